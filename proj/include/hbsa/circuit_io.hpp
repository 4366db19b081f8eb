// Copyright 2026 The hbsa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-oriented circuit documents. See docs/circuit-format.md for the
// grammar. parse_circuit(to_text(c)) == c for every parsed circuit.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hbsa/circuit.hpp"

namespace hbsa {

namespace detail {

struct Token {
  std::string_view text;
  int column = 0;  // 1-based, in code points
};

/// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
inline std::size_t invalid_utf8_offset(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    if (c < 0x80) len = 1;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
    else return i;
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return i;
    }
    i += len;
  }
  return std::string_view::npos;
}

inline int column_of(std::string_view line, std::size_t byte_offset) {
  int col = 1;
  for (std::size_t i = 0; i < byte_offset && i < line.size(); ++i) {
    if ((static_cast<unsigned char>(line[i]) & 0xC0) != 0x80) ++col;
  }
  return col;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    out.push_back({line.substr(start, i - start), column_of(line, start)});
  }
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto tail = [&](char c) { return head(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-'; };
  if (!head(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(), tail);
}

inline std::optional<long long> parse_integer(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  if (s.empty() || s[0] == '+') return std::nullopt;
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_real(std::string_view s) {
  if (s.empty() || s[0] == '+' || s[0] == '-') return std::nullopt;
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// sign * (coef * pi) / den, or sign * num / den without pi. Printing
/// relies on evaluating in exactly this order.
inline double angle_value(bool negative, double coef, bool has_pi, double den) {
  const double base = has_pi ? coef * kPi : coef;
  const double v = base / den;
  return negative ? -v : v;
}

/// Grammar: [-+]? ( REAL ('*' 'pi')? | 'pi' ) ('/' REAL)?
inline std::optional<double> parse_angle(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  double den = 1.0;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto d = parse_real(s.substr(slash + 1));
    if (!d || *d == 0.0) return std::nullopt;
    den = *d;
    s = s.substr(0, slash);
  }
  if (s == "pi") return angle_value(negative, 1.0, true, den);
  bool has_pi = false;
  if (s.size() > 3 && s.substr(s.size() - 3) == "*pi") {
    has_pi = true;
    s.remove_suffix(3);
  }
  auto coef = parse_real(s);
  if (!coef) return std::nullopt;
  return angle_value(negative, *coef, has_pi, den);
}

/// Symbolic when the symbolic text parses back to exactly `x`.
inline std::string print_angle(double x) {
  if (x == 0.0) return "0";
  for (int den : {1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 64}) {
    const long long n = std::llround(x * den / kPi);
    if (n == 0) continue;
    const long long an = n < 0 ? -n : n;
    if (angle_value(n < 0, static_cast<double>(an), true, den) != x) continue;
    std::string out = n < 0 ? "-" : "";
    if (an != 1) out += std::to_string(an) + "*";
    out += "pi";
    if (den != 1) out += "/" + std::to_string(den);
    return out;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string print_signed(int v) { return (v > 0 ? "+" : "") + std::to_string(v); }

struct KeySpec {
  std::string_view key;
  bool required;
};

inline std::vector<KeySpec> stage_keys(StageKind k) {
  std::vector<KeySpec> keys{{"photon", true}, {"paths", true}};
  switch (k) {
    case StageKind::Hwp: keys.push_back({"angle", true}); break;
    case StageKind::DovePrism: keys.push_back({"alpha", true}); break;
    case StageKind::PhasePlate:
      keys.push_back({"phi", true});
      keys.push_back({"pol", false});
      keys.push_back({"oam", false});
      break;
    case StageKind::QPlate: keys.push_back({"q", true}); break;
    case StageKind::Spp: keys.push_back({"l", true}); break;
    case StageKind::PCos:
      keys.push_back({"q", true});
      keys.push_back({"impl", false});
      break;
    case StageKind::OCps:
    case StageKind::DpStage: keys.push_back({"impl", false}); break;
    case StageKind::OamHadamard:
      keys.push_back({"aux", false});
      keys.push_back({"impl", false});
      break;
    case StageKind::Sppm: keys.push_back({"ports", false}); break;
    default: break;
  }
  return keys;
}

inline std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.emplace_back(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Circuit run() {
    if (auto bad = invalid_utf8_offset(text_); bad != std::string_view::npos) {
      const std::size_t line_start = text_.rfind('\n', bad == 0 ? 0 : bad - 1);
      const std::size_t begin = (line_start == std::string_view::npos || bad == 0) ? 0 : line_start + 1;
      const int line = 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(bad), '\n'));
      fail(ErrorKind::SyntaxError, "invalid UTF-8", {line, column_of(text_.substr(begin), bad - begin)});
    }
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text_.size()) {
      const std::size_t nl = text_.find('\n', pos);
      std::string_view line = text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no;
      line_ = line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      handle_line(line);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    if (!saw_paths_) fail(ErrorKind::SemanticError, "document declares no paths", {line_no, 1}, {"'paths' directive"});
    return std::move(circuit_);
  }

 private:
  [[noreturn]] void fail(ErrorKind kind, const std::string& msg, SourcePos pos,
                         std::vector<std::string> expected = {}) const {
    throw Error(kind, msg, pos, std::move(expected));
  }
  [[noreturn]] void fail_at(const Token& t, ErrorKind kind, const std::string& msg,
                            std::vector<std::string> expected = {}) const {
    fail(kind, msg, {line_, t.column}, std::move(expected));
  }

  static std::string rest_of_line(std::string_view line, const Token& after) {
    const std::size_t start = static_cast<std::size_t>(after.text.data() - line.data()) + after.text.size();
    std::string_view rest = line.substr(start);
    while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
    while (!rest.empty() && is_space(rest.back())) rest.remove_suffix(1);
    return std::string(rest);
  }

  void require_before_stages(const Token& t) const {
    if (!circuit_.stages.empty())
      fail_at(t, ErrorKind::SemanticError, "'" + std::string(t.text) + "' must precede every stage");
  }

  void handle_line(std::string_view line) {
    const auto toks = tokenize(line);
    if (toks.empty()) return;
    const Token& head = toks[0];
    const std::string_view word = head.text;
    if (word == "name" || word == "description") {
      std::string& field = word == "name" ? circuit_.name : circuit_.description;
      bool& seen = word == "name" ? saw_name_ : saw_description_;
      if (seen) fail_at(head, ErrorKind::SemanticError, "duplicate '" + std::string(word) + "' directive");
      seen = true;
      field = rest_of_line(line, head);
      return;
    }
    if (word == "lmax") {
      require_before_stages(head);
      if (saw_lmax_) fail_at(head, ErrorKind::SemanticError, "duplicate 'lmax' directive");
      if (toks.size() != 2) {
        const Token& where = toks.size() > 2 ? toks[2] : head;
        fail_at(where, ErrorKind::SyntaxError, "lmax takes exactly one value", {"a positive integer"});
      }
      auto v = parse_integer(toks[1].text);
      if (!v) fail_at(toks[1], ErrorKind::SyntaxError, "bad lmax value", {"a positive integer"});
      if (*v < 1 || *v > 64) fail_at(toks[1], ErrorKind::SemanticError, "lmax out of range", {"an integer in 1..64"});
      circuit_.lmax = static_cast<int>(*v);
      saw_lmax_ = true;
      return;
    }
    if (word == "paths") {
      require_before_stages(head);
      if (saw_paths_) fail_at(head, ErrorKind::SemanticError, "duplicate 'paths' directive");
      if (toks.size() < 2) fail_at(head, ErrorKind::SyntaxError, "no path names", {"one or more path names"});
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const auto& t = toks[i];
        if (!is_identifier(t.text)) fail_at(t, ErrorKind::SyntaxError, "bad path name", {"an identifier"});
        const std::string name(t.text);
        if (std::find(circuit_.paths.begin(), circuit_.paths.end(), name) != circuit_.paths.end())
          fail_at(t, ErrorKind::SemanticError, "path '" + name + "' declared twice");
        circuit_.paths.push_back(name);
      }
      saw_paths_ = true;
      return;
    }
    if (word == "photon") {
      require_before_stages(head);
      if (toks.size() != 2) {
        const Token& where = toks.size() > 2 ? toks[2] : head;
        fail_at(where, ErrorKind::SyntaxError, "photon takes exactly one label", {"A", "B"});
      }
      const Photon p = parse_photon_label(toks[1]);
      if (circuit_.declares(p)) fail_at(toks[1], ErrorKind::SemanticError, "photon declared twice");
      circuit_.photons.push_back(p);
      return;
    }
    if (word == "stage") {
      handle_stage(toks);
      return;
    }
    fail_at(head, ErrorKind::SyntaxError, "unknown directive '" + std::string(word) + "'",
            {"name", "description", "lmax", "paths", "photon", "stage"});
  }

  Photon parse_photon_label(const Token& t) const {
    if (t.text == "A") return Photon::A;
    if (t.text == "B") return Photon::B;
    fail_at(t, ErrorKind::SyntaxError, "bad photon label '" + std::string(t.text) + "'", {"A", "B"});
  }

  std::string declared_path(const Token& t, std::string_view name) const {
    if (!saw_paths_ || std::find(circuit_.paths.begin(), circuit_.paths.end(), name) == circuit_.paths.end())
      fail_at(t, ErrorKind::UnknownPath, "path '" + std::string(name) + "' is not declared", {"a declared path"});
    return std::string(name);
  }

  std::vector<std::string> path_list(const Token& t, std::string_view value) const {
    std::vector<std::string> out;
    for (const auto& item : split_commas(value)) {
      if (item.empty()) fail_at(t, ErrorKind::SyntaxError, "empty entry in path list", {"a path name"});
      out.push_back(declared_path(t, item));
    }
    return out;
  }

  void handle_stage(const std::vector<Token>& toks) {
    if (toks.size() < 2) {
      fail_at(toks[0], ErrorKind::SyntaxError, "stage without a kind", {"a stage kind"});
    }
    const Token& kind_tok = toks[1];
    auto kind = stage_kind_from_keyword(kind_tok.text);
    if (!kind) {
      std::vector<std::string> all;
      for (StageKind k : kAllStageKinds) all.emplace_back(keyword(k));
      fail_at(kind_tok, ErrorKind::SyntaxError, "unknown stage kind '" + std::string(kind_tok.text) + "'", all);
    }
    const auto specs = stage_keys(*kind);
    Stage st;
    st.kind = *kind;
    st.line = line_;
    std::map<std::string, bool, std::less<>> seen;

    for (std::size_t i = 2; i < toks.size(); ++i) {
      const Token& t = toks[i];
      const auto eq = t.text.find('=');
      if (eq == std::string_view::npos || eq == 0)
        fail_at(t, ErrorKind::SyntaxError, "malformed parameter '" + std::string(t.text) + "'", {"key=value"});
      const std::string_view key = t.text.substr(0, eq);
      const std::string_view value = t.text.substr(eq + 1);
      const bool allowed =
          std::any_of(specs.begin(), specs.end(), [&](const KeySpec& s) { return s.key == key; });
      if (!allowed) {
        std::vector<std::string> names;
        for (const auto& s : specs) names.emplace_back(s.key);
        fail_at(t, ErrorKind::SemanticError,
                "unknown key '" + std::string(key) + "' for " + std::string(keyword(*kind)), names);
      }
      if (seen.count(key)) fail_at(t, ErrorKind::SemanticError, "duplicate key '" + std::string(key) + "'");
      seen[std::string(key)] = true;
      if (value.empty()) fail_at(t, ErrorKind::SyntaxError, "empty value for '" + std::string(key) + "'");
      assign(st, t, key, value);
    }
    for (const auto& s : specs) {
      if (s.required && !seen.count(s.key))
        fail_at(kind_tok, ErrorKind::SemanticError, "missing required key '" + std::string(s.key) + "'",
                {std::string(s.key) + "=..."});
    }
    if (needs_path_pair(*kind) && st.paths.size() != 2)
      fail_at(kind_tok, ErrorKind::SemanticError, std::string(keyword(*kind)) + " needs exactly two paths",
              {"paths=x,y"});
    circuit_.stages.push_back(std::move(st));
  }

  void assign(Stage& st, const Token& t, std::string_view key, std::string_view value) const {
    if (key == "photon") {
      Token v{value, t.column + 7};
      st.photon = parse_photon_label(v);
      if (!circuit_.declares(st.photon))
        fail_at(t, ErrorKind::SemanticError, "photon " + std::string(value) + " is not declared",
                {"a declared photon"});
    } else if (key == "paths") {
      st.paths = path_list(t, value);
    } else if (key == "angle" || key == "alpha" || key == "phi") {
      auto v = parse_angle(value);
      if (!v) fail_at(t, ErrorKind::SyntaxError, "bad angle '" + std::string(value) + "'", {"e.g. pi/8, -pi/4, 0.5"});
      st.angle = *v;
    } else if (key == "q") {
      const auto slash = value.find('/');
      auto num = parse_integer(value.substr(0, slash));
      std::optional<long long> den = 1;
      if (slash != std::string_view::npos) den = parse_integer(value.substr(slash + 1));
      if (!num || !den || *den <= 0)
        fail_at(t, ErrorKind::SyntaxError, "bad q '" + std::string(value) + "'", {"an integer or n/2"});
      if ((2 * *num) % *den != 0)
        fail_at(t, ErrorKind::NonPhysicalQ, "2q must be an integer", {"an integer or n/2"});
      st.twice_q = static_cast<int>(2 * *num / *den);
    } else if (key == "l" || key == "oam") {
      auto v = parse_integer(value);
      if (!v || std::abs(*v) > 1000)
        fail_at(t, ErrorKind::SyntaxError, "bad integer '" + std::string(value) + "'", {"a signed integer"});
      (key == "l" ? st.shift : st.oam) = static_cast<int>(*v);
    } else if (key == "pol") {
      if (value == "H") st.pol = Polarization::H;
      else if (value == "V") st.pol = Polarization::V;
      else fail_at(t, ErrorKind::SyntaxError, "bad polarization '" + std::string(value) + "'", {"H", "V"});
    } else if (key == "impl") {
      if (value == "canonical") st.impl = Impl::Canonical;
      else if (value == "decomposed") st.impl = Impl::Decomposed;
      else fail_at(t, ErrorKind::SyntaxError, "bad impl '" + std::string(value) + "'", {"canonical", "decomposed"});
    } else if (key == "aux") {
      st.aux = declared_path(t, value);
    } else if (key == "ports") {
      // Ports are local to the SPPM block, not declared paths.
      st.ports = split_commas(value);
      if (st.ports.size() != 2)
        fail_at(t, ErrorKind::SemanticError, "sppm needs exactly two ports", {"ports=c,d"});
      for (const auto& port : st.ports)
        if (!is_identifier(port)) fail_at(t, ErrorKind::SyntaxError, "bad port name", {"an identifier"});
      if (st.ports[0] == st.ports[1]) fail_at(t, ErrorKind::SemanticError, "sppm ports must differ");
    }
  }

  std::string_view text_;
  Circuit circuit_;
  int line_ = 0;
  bool saw_name_ = false;
  bool saw_description_ = false;
  bool saw_lmax_ = false;
  bool saw_paths_ = false;
};

}  // namespace detail

/// Parses a circuit document. Throws Error (SyntaxError, SemanticError,
/// UnknownPath or NonPhysicalQ) with a line:column position.
inline Circuit parse_circuit(std::string_view text) { return detail::Parser(text).run(); }

/// Canonical text: fixed directive order, fixed key order, symbolic angles.
inline std::string to_text(const Circuit& c) {
  std::ostringstream os;
  if (!c.name.empty()) os << "name " << c.name << "\n";
  if (!c.description.empty()) os << "description " << c.description << "\n";
  os << "lmax " << c.lmax << "\n";
  os << "paths " << detail::join(c.paths, " ") << "\n";
  for (Photon p : c.photons) os << "photon " << to_string(p) << "\n";
  for (const auto& s : c.stages) {
    os << "stage " << keyword(s.kind) << " photon=" << to_string(s.photon) << " paths=" << detail::join(s.paths, ",");
    if (s.angle) {
      const char* key = s.kind == StageKind::DovePrism ? "alpha" : s.kind == StageKind::PhasePlate ? "phi" : "angle";
      os << " " << key << "=" << detail::print_angle(*s.angle);
    }
    if (s.pol) os << " pol=" << to_string(*s.pol);
    if (s.oam) os << " oam=" << detail::print_signed(*s.oam);
    if (s.twice_q) os << " q=" << detail::format_half_integer(*s.twice_q);
    if (s.shift) os << " l=" << detail::print_signed(*s.shift);
    if (s.aux) os << " aux=" << *s.aux;
    if (!s.ports.empty()) os << " ports=" << detail::join(s.ports, ",");
    if (s.impl) os << " impl=" << to_string(*s.impl);
    os << "\n";
  }
  return os.str();
}

/// The two-photon analyzer: P-COS, O-CPS, OAM flip on photon B, OH, HWP
/// at pi/8, then spin-orbit readout of every origin path.
inline constexpr std::string_view kFig2Document = R"(# Polarization Bell-state analyzer using OAM and path as ancillary
# degrees of freedom. Photon A travels a1/b1, photon B travels a2/b2.
name fig2
description polarization Bell-state analyzer with spin-orbit readout
lmax 4
paths a1 b1 a2 b2
photon A
photon B
stage p_cos photon=A paths=a1,b1 q=1/2
stage p_cos photon=B paths=a2,b2 q=1/2
stage o_cps photon=A paths=a1,b1
stage o_cps photon=B paths=a2,b2
stage dp_stage photon=B paths=a2,b2
stage oh photon=A paths=a1,b1
stage oh photon=B paths=a2,b2
stage hwp photon=A paths=a1,b1 angle=pi/8
stage hwp photon=B paths=a2,b2 angle=pi/8
stage sppm photon=A paths=a1 ports=c,d
stage sppm photon=A paths=b1 ports=c,d
stage sppm photon=B paths=a2 ports=c,d
stage sppm photon=B paths=b2 ports=c,d
)";

inline std::optional<std::string_view> builtin_document(std::string_view name) {
  if (name == "fig2") return kFig2Document;
  return std::nullopt;
}

inline const Circuit& fig2_circuit() {
  static const Circuit c = parse_circuit(kFig2Document);
  return c;
}

/// Loads "builtin:<name>" or a file path.
inline Circuit load_circuit(std::string_view source) {
  constexpr std::string_view prefix = "builtin:";
  if (source.substr(0, prefix.size()) == prefix) {
    const auto name = source.substr(prefix.size());
    if (auto doc = builtin_document(name)) return parse_circuit(*doc);
    throw Error(ErrorKind::InvalidArgument, "no builtin circuit named '" + std::string(name) + "'");
  }
  std::ifstream in{std::string(source), std::ios::binary};
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + std::string(source) + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_circuit(ss.str());
}

}  // namespace hbsa
