#include "canardkit/system_file.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "canardkit/error.hpp"
#include "canardkit/parser.hpp"

namespace canardkit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Column (1-based) of `part` inside `line`.
std::size_t column_of(std::string_view line, std::string_view part) {
  return static_cast<std::size_t>(part.data() - line.data()) + 1;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

MultiPoly parse_expr(std::string_view line_text, std::string_view expr, std::size_t line) {
  const std::string_view e = trim(expr);
  if (e.empty()) throw ParseError("empty expression", line, column_of(line_text, expr));
  try {
    return parse_poly(e);
  } catch (const ParseError& err) {
    throw ParseError(err.message(), line, column_of(line_text, e) + err.column() - 1);
  }
}

PolyVectorField parse_pair(std::string_view line_text, std::string_view value, std::size_t line) {
  const auto parts = split(value, ';');
  if (parts.size() != 2) {
    throw ParseError("expected two components separated by ';'", line, column_of(line_text, value));
  }
  return PolyVectorField({parse_expr(line_text, parts[0], line), parse_expr(line_text, parts[1], line)});
}

}  // namespace

Rational parse_number(std::string_view text, std::size_t line, std::size_t column) {
  const std::string_view s = trim(text);
  auto fail = [&]() -> Rational { throw ParseError("invalid number '" + std::string(s) + "'", line, column); };
  if (s.empty()) return fail();
  if (s.find('/') != std::string_view::npos) {
    try {
      const Rational q = Rational::parse(s);
      return q;
    } catch (const std::exception&) {
      return fail();
    }
  }
  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  std::string digits;
  long scale = 0;
  bool any = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    digits += s[i++];
    any = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits += s[i++];
      --scale;
      any = true;
    }
  }
  if (!any) return fail();
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    std::string ed;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ed += s[i++];
    if (ed.empty() || ed.size() > 4) return fail();
    scale += eneg ? -std::stol(ed) : std::stol(ed);
  }
  if (i != s.size()) return fail();
  Rational value(mpz_class(digits, 10));
  const Rational ten(10);
  value *= scale >= 0 ? ten.pow(static_cast<unsigned>(scale)) : ten.pow(static_cast<unsigned>(-scale)).reciprocal();
  return negative ? -value : value;
}

Box parse_box(std::string_view text, std::size_t line, std::size_t column) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw ParseError("box needs four numbers xmin,xmax,ymin,ymax", line, column);
  Box b;
  b.xmin = parse_number(parts[0], line, column);
  b.xmax = parse_number(parts[1], line, column);
  b.ymin = parse_number(parts[2], line, column);
  b.ymax = parse_number(parts[3], line, column);
  b.validate();
  return b;
}

Weights parse_weights(std::string_view text, std::size_t line, std::size_t column) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ParseError("weights need three integers a,b,c", line, column);
  std::array<unsigned, 3> w{};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string_view p = trim(parts[i]);
    if (p.empty() || p.size() > 9 ||
        !std::all_of(p.begin(), p.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw ParseError("weights need three integers a,b,c", line, column);
    }
    w[i] = static_cast<unsigned>(std::stoul(std::string(p)));
  }
  Weights out{w[0], w[1], w[2]};
  out.validate();
  return out;
}

SystemFile parse_system(std::string_view text, std::string source) {
  SystemFile sys;
  sys.source = std::move(source);
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string_view content = line;
    if (const auto hash = content.find('#'); hash != std::string_view::npos) content = content.substr(0, hash);
    if (trim(content).empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no, column_of(line, trim(content)));
    }
    const std::string_view key_view = trim(content.substr(0, eq));
    const std::string key(key_view);
    const std::string_view value = content.substr(eq + 1);
    const std::size_t vcol = column_of(line, trim(value).empty() ? value : trim(value));
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", line_no, column_of(line, key_view));
    if (trim(value).empty()) throw ParseError("missing value for '" + key + "'", line_no, vcol);
    if (key == "X0") {
      sys.x0 = parse_pair(line, value, line_no);
    } else if (key == "X1") {
      sys.x1 = parse_pair(line, value, line_no);
    } else if (key == "weights") {
      sys.weights = parse_weights(value, line_no, vcol);
    } else if (key == "box") {
      sys.box = parse_box(value, line_no, vcol);
    } else if (key == "epsilon") {
      sys.epsilon = parse_number(value, line_no, vcol);
      if (sys.epsilon->sign() <= 0) throw ParseError("epsilon must be positive", line_no, vcol);
    } else if (key == "delta") {
      sys.delta = parse_number(value, line_no, vcol);
      if (sys.delta->sign() <= 0) throw ParseError("delta must be positive", line_no, vcol);
    } else {
      throw ParseError("unknown key '" + key + "'", line_no, column_of(line, key_view));
    }
  }
  if (!seen.count("X0")) throw ParseError("missing X0", line_no, 1);
  if (!seen.count("X1")) throw ParseError("missing X1", line_no, 1);
  return sys;
}

SystemFile load_system(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open system file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read system file '" + path + "'");
  return parse_system(ss.str(), path);
}

std::string SystemFile::to_text() const {
  std::ostringstream os;
  os << "X0 = " << x0[0].to_string() << " ; " << x0[1].to_string() << "\n";
  os << "X1 = " << x1[0].to_string() << " ; " << x1[1].to_string() << "\n";
  if (weights) os << "weights = " << weights->to_string() << "\n";
  if (box) {
    os << "box = " << box->xmin << "," << box->xmax << "," << box->ymin << "," << box->ymax << "\n";
  }
  if (epsilon) os << "epsilon = " << *epsilon << "\n";
  if (delta) os << "delta = " << *delta << "\n";
  return os.str();
}

}  // namespace canardkit
