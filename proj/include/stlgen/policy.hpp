#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stlgen/ast.hpp"
#include "stlgen/errors.hpp"

namespace stlgen {

/// Bounded STL grammar the policy samples from. Interval bounds come from
/// finite bins (hi = lo + width, width > 0), thresholds and variables from
/// finite vocabularies, recursion stops at max_depth.
struct PolicyConfig {
  std::vector<std::string> variables = {"x", "y"};
  std::vector<double> thresholds = {0, 1, 5, 40};
  std::vector<double> interval_lo = {0, 1, 2};
  std::vector<double> interval_width = {2, 4, 21};
  std::size_t max_depth = 3;
  std::size_t context_buckets = 32;

  void validate() const;
  /// Structural fingerprint; policies interoperate only when equal.
  std::string schema_signature() const;
};

/// Decision heads attached to every tree slot.
enum class HeadKind : std::uint8_t {
  Class = 0,      // atom | not | binary | temporal
  BinaryKind,     // and | or | implies
  TemporalKind,   // G | F | U
  IntervalLo,
  IntervalWidth,
  Variable,
  Comparator,     // > >= < <= ==
  Threshold,
};
inline constexpr std::size_t kHeadKinds = 8;

enum : std::uint16_t { kClassAtom = 0, kClassNot = 1, kClassBinary = 2, kClassTemporal = 3 };

/// One sampled categorical choice and its log-probability at sampling time.
struct Decision {
  std::uint32_t slot = 0;
  HeadKind head = HeadKind::Class;
  std::uint16_t category = 0;
  double logprob = 0.0;
};

struct PolicySample {
  Formula formula;
  std::vector<Decision> decisions;
  double logprob = 0.0;  // sum of decision log-probabilities
};

/* Conditioned categorical policy over formula derivations.
 *
 * Tree slots are indexed heap-style (root 0, children of s at 2s+1 and
 * 2s+2) down to max_depth, where the class choice is forced to an atom.
 * Every (slot, head) pair owns base logits plus additive offsets selected
 * by the hashed bag-of-words buckets of the conditioning text, so different
 * inputs induce different decision distributions. Heads with a single
 * category are never recorded as decisions.
 */
class GrammarPolicy {
public:
  explicit GrammarPolicy(PolicyConfig cfg);

  const PolicyConfig& config() const noexcept { return cfg_; }
  const std::vector<double>& params() const noexcept { return params_; }
  std::vector<double>& params() noexcept { return params_; }
  std::size_t param_count() const noexcept { return params_.size(); }

  std::size_t slot_count() const noexcept { return slot_count_; }
  std::size_t head_categories(HeadKind head) const;
  std::size_t slot_depth(std::size_t slot) const;

  /// Sorted distinct context buckets activated by x.
  std::vector<std::size_t> context_of(const std::string& x) const;

  /// Logits of one head under a context (base + active offsets).
  std::vector<double> logits(std::size_t slot, HeadKind head,
                             const std::vector<std::size_t>& ctx) const;
  std::vector<double> probabilities(std::size_t slot, HeadKind head,
                                    const std::vector<std::size_t>& ctx) const;
  double decision_logprob(const Decision& d, const std::vector<std::size_t>& ctx) const;

  /// Offset of the base-logit block of (slot, head) in params(); the bucket
  /// b offset row starts at base + (1 + b) * categories.
  std::size_t param_offset(std::size_t slot, HeadKind head) const;

  /// Ancestral sampling of one derivation conditioned on x.
  PolicySample sample(const std::string& x, std::mt19937_64& rng) const;

  /// Deterministic highest-probability derivation (ties to lowest index).
  Formula decode_argmax(const std::string& x) const;

  /// Recomputed log-probability of a stored derivation under current
  /// parameters.
  double derivation_logprob(const std::vector<Decision>& decisions,
                            const std::vector<std::size_t>& ctx) const;

  /// Exact KL(this ‖ ref) of the derivation distributions conditioned on the
  /// given context: per-decision categorical KLs weighted by this policy's
  /// closed-form visit probabilities. Throws DataError on schema mismatch.
  double kl_to(const GrammarPolicy& ref, const std::vector<std::size_t>& ctx = {}) const;

  std::string to_json() const;
  static GrammarPolicy from_json(const std::string& json_text);
  void save(const std::string& path) const;
  static GrammarPolicy load(const std::string& path);

private:
  PolicyConfig cfg_;
  std::size_t slot_count_ = 0;
  std::vector<double> params_;
  std::array<std::size_t, kHeadKinds> head_sizes_{};
  std::size_t per_slot_params_ = 0;
  std::array<std::size_t, kHeadKinds> head_offsets_{};

  struct SampleState;
  Formula expand(std::size_t slot, std::size_t depth, const std::vector<std::size_t>& ctx,
                 SampleState& state) const;
  double kl_slot(const GrammarPolicy& ref, std::size_t slot, std::size_t depth,
                 double visit_prob, const std::vector<std::size_t>& ctx) const;
};

}  // namespace stlgen
