#include "stlgen/signal.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stlgen {

const std::vector<double>& Signal::channel(const std::string& name) const {
  auto it = channels.find(name);
  if (it == channels.end()) throw EvalError("signal has no channel named '" + name + "'");
  return it->second;
}

void Signal::validate() const {
  if (dt <= 0) throw DataError("signal time step must be positive");
  if (channels.empty()) throw DataError("signal has no channels");
  std::size_t n = channels.begin()->second.size();
  if (n == 0) throw DataError("signal channels are empty");
  for (const auto& [name, values] : channels) {
    if (values.size() != n)
      throw DataError("channel '" + name + "' length differs from the others");
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (std::string& f : fields) {
    std::size_t a = f.find_first_not_of(" \t");
    std::size_t b = f.find_last_not_of(" \t");
    f = a == std::string::npos ? "" : f.substr(a, b - a + 1);
  }
  return fields;
}

double parse_double_field(const std::string& s, std::size_t line_no, const std::string& origin) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw DataError(origin + ":" + std::to_string(line_no) + ": invalid number '" + s + "'");
  return v;
}

}  // namespace

Signal parse_signal_csv(const std::string& content, const std::string& origin) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty signal file");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "time")
    throw DataError(origin + ": header must be \"time,var1,var2,...\"");

  std::vector<std::string> names(header.begin() + 1, header.end());
  std::vector<double> times;
  std::vector<std::vector<double>> columns(names.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    times.push_back(parse_double_field(fields[0], line_no, origin));
    for (std::size_t c = 0; c < names.size(); ++c)
      columns[c].push_back(parse_double_field(fields[c + 1], line_no, origin));
  }
  if (times.empty()) throw DataError(origin + ": no data rows");

  Signal sig;
  if (times.size() == 1) {
    sig.dt = 1.0;
  } else {
    double dt = times[1] - times[0];
    if (dt <= 0) throw DataError(origin + ": times must be strictly increasing");
    double scale = std::max(std::abs(times.back()), 1.0);
    for (std::size_t i = 1; i < times.size(); ++i) {
      double step = times[i] - times[i - 1];
      if (step <= 0) throw DataError(origin + ": times must be strictly increasing");
      if (std::abs(step - dt) > 1e-9 * scale)
        throw DataError(origin + ": non-uniform time step at row " + std::to_string(i + 1));
    }
    sig.dt = dt;
  }
  for (std::size_t c = 0; c < names.size(); ++c) sig.channels[names[c]] = std::move(columns[c]);
  sig.validate();
  return sig;
}

Signal load_signal_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open signal file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_signal_csv(ss.str(), path);
}

}  // namespace stlgen
