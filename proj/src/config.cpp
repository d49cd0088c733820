#include "ncl/config.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

namespace ncl::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line_no, const std::string& line, const std::string& why) {
  throw ConfigError("config line " + std::to_string(line_no) + " ('" + line +
                    "'): " + why);
}

double parse_num(const std::string& v, int line_no, const std::string& line) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) fail(line_no, line, "trailing characters after number");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(line_no, line, "not a number: '" + v + "'");
  }
}

long long parse_int(const std::string& v, int line_no, const std::string& line) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) fail(line_no, line, "trailing characters after integer");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(line_no, line, "not an integer: '" + v + "'");
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

InitSpec parse_init(const std::string& v, int line_no, const std::string& line) {
  const auto tok = split_ws(v);
  InitSpec spec;
  if (tok.empty()) fail(line_no, line, "init needs a preset name");
  if (tok[0] == "single_mode") {
    if (tok.size() != 3) fail(line_no, line, "usage: init = single_mode <k> <amplitude>");
    spec.kind = InitSpec::Kind::single_mode;
    spec.k = static_cast<int>(parse_int(tok[1], line_no, line));
    spec.amplitude = parse_num(tok[2], line_no, line);
    if (spec.k < 1) fail(line_no, line, "single_mode k must be >= 1");
  } else if (tok[0] == "gaussian_bump") {
    if (tok.size() != 4)
      fail(line_no, line, "usage: init = gaussian_bump <amplitude> <width> <center>");
    spec.kind = InitSpec::Kind::gaussian_bump;
    spec.amplitude = parse_num(tok[1], line_no, line);
    spec.width = parse_num(tok[2], line_no, line);
    spec.center = parse_num(tok[3], line_no, line);
    if (!(spec.width > 0.0)) fail(line_no, line, "gaussian_bump width must be > 0");
  } else if (tok[0] == "random_bandlimited") {
    if (tok.size() != 3)
      fail(line_no, line, "usage: init = random_bandlimited <kmax> <amplitude>");
    spec.kind = InitSpec::Kind::random_bandlimited;
    spec.kmax = static_cast<int>(parse_int(tok[1], line_no, line));
    spec.amplitude = parse_num(tok[2], line_no, line);
    if (spec.kmax < 1) fail(line_no, line, "random_bandlimited kmax must be >= 1");
  } else {
    fail(line_no, line, "unknown init preset '" + tok[0] + "'");
  }
  return spec;
}

void validate(const RunConfig& c) {
  if (c.n < 16 || c.n > (1 << 20) || c.n % 2 != 0)
    throw ConfigError("n must be even and in [16, 2^20]");
  if (!(c.length > 0.0)) throw ConfigError("length must be positive");
  if (!(c.tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ConfigError("gamma must be in [0, 1)");
  if (!(c.tau * (1.0 - c.gamma) > 0.0))
    throw ConfigError("beta = tau*(1-gamma) must be positive");
  if (!(c.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(c.t_final >= c.dt)) throw ConfigError("t_final must be >= dt");
  if (!(c.s >= 0.0)) throw ConfigError("s must be >= 0");
  if (c.scheme != "imex" && c.scheme != "picard")
    throw ConfigError("scheme must be imex or picard");
  if (c.background != "flat" && c.background != "ivantsov")
    throw ConfigError("background must be flat or ivantsov");
  if (!(c.window_inner_fraction > 0.0 && c.window_inner_fraction <= 0.8))
    throw ConfigError("window_inner_fraction must be in (0, 0.8]");
  if (!(c.picard_tol > 0.0)) throw ConfigError("picard_tol must be positive");
  if (c.picard_max_iter < 1) throw ConfigError("picard_max_iter must be >= 1");
  if (c.output_stride < 1) throw ConfigError("output_stride must be >= 1");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, raw, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, raw, "empty key");
    if (val.empty()) fail(line_no, raw, "empty value");

    if (key == "n") c.n = static_cast<int>(parse_int(val, line_no, raw));
    else if (key == "length") c.length = parse_num(val, line_no, raw);
    else if (key == "tau") c.tau = parse_num(val, line_no, raw);
    else if (key == "gamma") c.gamma = parse_num(val, line_no, raw);
    else if (key == "epsilon") c.epsilon = parse_num(val, line_no, raw);
    else if (key == "dt") c.dt = parse_num(val, line_no, raw);
    else if (key == "t_final") c.t_final = parse_num(val, line_no, raw);
    else if (key == "s") c.s = parse_num(val, line_no, raw);
    else if (key == "scheme") c.scheme = val;
    else if (key == "background") c.background = val;
    else if (key == "window_inner_fraction") c.window_inner_fraction = parse_num(val, line_no, raw);
    else if (key == "picard_tol") c.picard_tol = parse_num(val, line_no, raw);
    else if (key == "picard_max_iter") c.picard_max_iter = static_cast<int>(parse_int(val, line_no, raw));
    else if (key == "output_stride") c.output_stride = static_cast<int>(parse_int(val, line_no, raw));
    else if (key == "out_dir") c.out_dir = val;
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(val, line_no, raw));
    else if (key == "init") c.init = parse_init(val, line_no, raw);
    else fail(line_no, raw, "unknown key '" + key + "'");
  }
  validate(c);
  return c;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream out;
  out << "n = " << c.n << "\n";
  out << "length = " << format_double(c.length) << "\n";
  out << "tau = " << format_double(c.tau) << "\n";
  out << "gamma = " << format_double(c.gamma) << "\n";
  out << "epsilon = " << format_double(c.epsilon) << "\n";
  out << "dt = " << format_double(c.dt) << "\n";
  out << "t_final = " << format_double(c.t_final) << "\n";
  out << "s = " << format_double(c.s) << "\n";
  out << "scheme = " << c.scheme << "\n";
  out << "background = " << c.background << "\n";
  out << "window_inner_fraction = " << format_double(c.window_inner_fraction) << "\n";
  out << "picard_tol = " << format_double(c.picard_tol) << "\n";
  out << "picard_max_iter = " << c.picard_max_iter << "\n";
  out << "output_stride = " << c.output_stride << "\n";
  if (!c.out_dir.empty()) out << "out_dir = " << c.out_dir << "\n";
  out << "seed = " << c.seed << "\n";
  out << "init = ";
  switch (c.init.kind) {
    case InitSpec::Kind::single_mode:
      out << "single_mode " << c.init.k << " " << format_double(c.init.amplitude);
      break;
    case InitSpec::Kind::gaussian_bump:
      out << "gaussian_bump " << format_double(c.init.amplitude) << " "
          << format_double(c.init.width) << " " << format_double(c.init.center);
      break;
    case InitSpec::Kind::random_bandlimited:
      out << "random_bandlimited " << c.init.kmax << " "
          << format_double(c.init.amplitude);
      break;
  }
  out << "\n";
  return out.str();
}

}  // namespace ncl::cli
