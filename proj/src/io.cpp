#include "iml/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace iml {

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

namespace {

void write(std::ostringstream& o, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(indent * (depth + 1), ' ') : "";
  const std::string end = indent > 0 ? "\n" + std::string(indent * depth, ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        o << "{}";
        return;
      }
      o << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) o << ',';
        first = false;
        o << pad << Json(it.key()).dump() << sep;
        write(o, it.value(), indent, depth + 1);
      }
      o << end << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        o << "[]";
        return;
      }
      o << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) o << ',';
        first = false;
        o << pad;
        write(o, v, indent, depth + 1);
      }
      o << end << ']';
      return;
    }
    case Json::value_t::number_float:
      o << format_number(j.get<double>());
      return;
    default:
      o << j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::ostringstream o;
  write(o, j, indent, 0);
  o << '\n';
  return o.str();
}

AsymptoticClass parse_class(const std::string& s) {
  const auto open = s.find('('), close = s.find(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::invalid_argument("model class: expected e.g. AF(0,4), got '" + s + "'");
  const std::string kind = s.substr(0, open);
  const std::vector<double> a = parse_list(s.substr(open + 1, close - open - 1));
  const std::string tail = s.substr(close + 1);
  if (a.size() != 2 || !(tail.empty() || (tail == "h" && kind == "ALF")))
    throw std::invalid_argument("model class: expected two parameters in '" + s + "'");
  const auto integer = [&](double v) {
    if (v != std::round(v)) throw std::invalid_argument("model class: integer parameter expected in '" + s + "'");
    return long(v);
  };
  if (kind == "AF") return AsymptoticClass::af(a[0], a[1]);
  if (kind == "ALF") return AsymptoticClass::alf(integer(a[0]), a[1], tail == "h");
  if (kind == "ALE") return AsymptoticClass::ale(integer(a[0]), integer(a[1]));
  throw std::invalid_argument("model class: unknown kind '" + kind + "'");
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw std::invalid_argument("grid: expected NxM, got '" + s + "'");
  std::size_t p1 = 0, p2 = 0;
  int n = 0, m = 0;
  try {
    n = std::stoi(s.substr(0, x), &p1);
    m = std::stoi(s.substr(x + 1), &p2);
  } catch (const std::exception&) {
    throw std::invalid_argument("grid: expected NxM, got '" + s + "'");
  }
  if (p1 != x || p2 != s.size() - x - 1 || n < 5 || m < 5)
    throw std::invalid_argument("grid: expected NxM with N, M >= 5, got '" + s + "'");
  return {n, m};
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("expected a number, got '" + item + "'");
    }
    if (item.find_first_not_of(" \t", pos) != std::string::npos)
      throw std::invalid_argument("expected a number, got '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace iml
