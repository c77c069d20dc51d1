#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "floydlab/group.hpp"

namespace floydlab {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw input_error("line " + std::to_string(line) + ": " + msg);
}

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits "a, b, {c, d}, [e]" at top-level commas.
std::vector<std::string> split_top(const std::string& s, int line) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '{' || ch == '[') depth++;
    if (ch == '}' || ch == ']') depth--;
    if (depth < 0) fail(line, "unbalanced brackets");
    if (ch == ',' && depth == 0) {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (depth != 0) fail(line, "unbalanced brackets");
  if (!strip(cur).empty()) out.push_back(strip(cur));
  return out;
}

std::string unquote(const std::string& s, int line) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  fail(line, "expected quoted string, got '" + s + "'");
}

int to_int(const std::string& s, int line) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    fail(line, "expected integer, got '" + s + "'");
  }
}

Factor parse_factor(const std::string& body, int line) {
  Factor f;
  bool have_type = false;
  std::vector<std::string> names;
  for (const auto& kv : split_top(body, line)) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos) fail(line, "expected key=value in factor entry");
    std::string key = strip(kv.substr(0, eq));
    std::string val = strip(kv.substr(eq + 1));
    if (key == "type") {
      have_type = true;
      if (val == "free_abelian") {
        f.type = FactorType::FreeAbelian;
      } else if (val == "free") {
        f.type = FactorType::FreeAbelian;
        f.rank = 1;
      } else if (val == "cyclic") {
        f.type = FactorType::Cyclic;
      } else {
        fail(line, "unknown factor type '" + val + "'");
      }
    } else if (key == "rank") {
      f.rank = to_int(val, line);
    } else if (key == "order") {
      f.order = to_int(val, line);
    } else if (key == "name") {
      names = {unquote(val, line)};
    } else if (key == "names") {
      if (val.size() < 2 || val.front() != '[' || val.back() != ']')
        fail(line, "names expects a [..] list");
      for (const auto& n : split_top(val.substr(1, val.size() - 2), line))
        names.push_back(unquote(n, line));
    } else {
      fail(line, "unknown key '" + key + "' in factor entry");
    }
  }
  if (!have_type) fail(line, "factor entry needs a type");
  f.names = names;
  return f;
}

}  // namespace

GroupSpec GroupSpec::parse(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::vector<Factor> factors;
  std::vector<int> peripheral;
  bool have_factors = false, have_peripheral = false;

  while (std::getline(in, raw)) {
    line++;
    size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string s = strip(raw);
    if (s.empty()) continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    std::string key = strip(s.substr(0, eq));
    std::string val = strip(s.substr(eq + 1));

    if (key == "factors") {
      if (val.size() < 2 || val.front() != '[' || val.back() != ']')
        fail(line, "factors expects a [..] list");
      for (const auto& entry : split_top(val.substr(1, val.size() - 2), line)) {
        if (entry.size() < 2 || entry.front() != '{' || entry.back() != '}')
          fail(line, "factor entry expects {..}");
        factors.push_back(parse_factor(entry.substr(1, entry.size() - 2), line));
      }
      have_factors = true;
    } else if (key == "peripheral") {
      if (val.size() < 2 || val.front() != '[' || val.back() != ']')
        fail(line, "peripheral expects a [..] list of factor indices");
      for (const auto& ix : split_top(val.substr(1, val.size() - 2), line))
        peripheral.push_back(to_int(ix, line));
      have_peripheral = true;
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }
  if (!have_factors) throw input_error("group description has no factors");

  if (have_peripheral) {
    for (int ix : peripheral) {
      if (ix < 0 || ix >= int(factors.size()))
        throw input_error("peripheral index " + std::to_string(ix) + " out of range");
      if (factors[ix].type != FactorType::FreeAbelian)
        throw input_error("peripheral factors must be free abelian");
      factors[ix].peripheral = true;
    }
  } else {
    // default peripheral structure: the Z^d factors with d >= 2
    for (auto& f : factors)
      if (f.type == FactorType::FreeAbelian && f.rank >= 2) f.peripheral = true;
  }
  return GroupSpec::from_factors(std::move(factors));
}

GroupSpec GroupSpec::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open group file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace floydlab
