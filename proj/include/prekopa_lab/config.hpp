#pragma once

// Flat key/value documents with dotted keys:
//
//   # comment
//   weight.kind = quadratic-form
//   weight.params = 1, -1, -1, 2
//   weight.fiber.shape = full-space
//
// Every diagnostic names the source and line it comes from.

#include <cctype>
#include <charconv>
#include <complex>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "report.hpp"
#include "weights.hpp"

namespace prekopa {

struct ConfigEntry {
  std::string value;
  int line = 0;  // 0: not from a document (default or command-line flag)
};

class KeyValueDocument {
public:
  KeyValueDocument() = default;
  explicit KeyValueDocument(std::string source) : source_(std::move(source)) {}

  const std::string& source() const noexcept { return source_; }
  const std::map<std::string, ConfigEntry>& entries() const noexcept { return entries_; }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const ConfigEntry* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }
  void set(const std::string& key, std::string value, int line = 0) { entries_[key] = {std::move(value), line}; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const auto* e = find(key);
    const int line = e ? e->line : 0;
    std::string where = line > 0 ? source_ + ":" + std::to_string(line) + ": " : "";
    throw ConfigError(where + key + ": " + message, line);
  }

private:
  std::string source_;
  std::map<std::string, ConfigEntry> entries_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool valid_key(std::string_view key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')) return false;
  }
  return true;
}

inline std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',' || s[i] == ';') {
      auto piece = trim(s.substr(start, i - start));
      if (!piece.empty()) out.push_back(piece);
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

inline KeyValueDocument parse_key_values(std::string_view text, std::string source = "config") {
  KeyValueDocument doc(std::move(source));
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    const std::string where = doc.source() + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'", line_no);
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (!detail::valid_key(key)) throw ConfigError(where + "malformed key '" + std::string(key) + "'", line_no);
    if (doc.has(std::string(key)))
      throw ConfigError(where + "duplicate key '" + std::string(key) + "'", line_no);
    doc.set(std::string(key), std::string(value), line_no);
    if (end == text.size()) break;
  }
  return doc;
}

/// Accepts "x", "x+yi", "x-yi", "yi", "i", "-i".
inline std::optional<cplx> parse_complex(std::string_view s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) return std::nullopt;
  if (t.back() != 'i') {
    auto re = detail::to_double(t);
    if (!re) return std::nullopt;
    return cplx(*re, 0.0);
  }
  t.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t i = t.size(); i-- > 1;) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string re_part = split == std::string::npos ? "" : t.substr(0, split);
  std::string im_part = split == std::string::npos ? t : t.substr(split);
  if (im_part.empty() || im_part == "+") im_part = "1";
  if (im_part == "-") im_part = "-1";
  double re = 0;
  if (!re_part.empty()) {
    auto v = detail::to_double(re_part);
    if (!v) return std::nullopt;
    re = *v;
  }
  auto im = detail::to_double(im_part);
  if (!im) return std::nullopt;
  return cplx(re, *im);
}

/// Typed reads from a document; failures are ConfigErrors naming the key's line.
class ConfigReader {
public:
  explicit ConfigReader(const KeyValueDocument& doc) : doc_(doc) {}

  std::string string(const std::string& key) const {
    const auto* e = doc_.find(key);
    if (!e) doc_.fail(key, "missing required key");
    return e->value;
  }

  double real(const std::string& key) const {
    auto v = detail::to_double(string(key));
    if (!v || !std::isfinite(*v)) doc_.fail(key, "expected a finite number");
    return *v;
  }

  double positive(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0)) doc_.fail(key, "expected a positive number");
    return v;
  }

  int integer(const std::string& key) const {
    const auto s = detail::trim(string(key));
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) doc_.fail(key, "expected an integer");
    return v;
  }

  bool boolean(const std::string& key) const {
    const auto s = string(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    doc_.fail(key, "expected true or false");
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    const auto text = string(key);
    for (auto piece : detail::split_list(text)) {
      auto v = detail::to_double(piece);
      if (!v || !std::isfinite(*v)) doc_.fail(key, "bad number '" + std::string(piece) + "'");
      out.push_back(*v);
    }
    return out;
  }

  cplx complex(const std::string& key) const {
    auto v = parse_complex(string(key));
    if (!v) doc_.fail(key, "expected a complex number like 0.5-1i");
    return *v;
  }

  std::vector<cplx> complexes(const std::string& key) const {
    std::vector<cplx> out;
    const auto text = string(key);
    for (auto piece : detail::split_list(text)) {
      auto v = parse_complex(piece);
      if (!v) doc_.fail(key, "bad complex number '" + std::string(piece) + "'");
      out.push_back(*v);
    }
    return out;
  }

  const KeyValueDocument& document() const noexcept { return doc_; }

private:
  const KeyValueDocument& doc_;
};

inline std::optional<WeightKind> parse_weight_kind(std::string_view s) {
  for (auto k : {WeightKind::quadratic_form, WeightKind::max_affine, WeightKind::coupled_gaussian,
                 WeightKind::norm_power, WeightKind::radial_planar, WeightKind::custom_callable}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

inline std::optional<ConvexFlag> parse_convex_flag(std::string_view s) {
  for (auto f : {ConvexFlag::convex, ConvexFlag::nonconvex, ConvexFlag::unknown}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

/// Builds a WeightSpec from the weight.* keys of a document.
inline WeightSpec weight_from_document(const KeyValueDocument& doc) {
  ConfigReader rd(doc);
  const auto kind = parse_weight_kind(rd.string("weight.kind"));
  if (!kind) doc.fail("weight.kind", "unknown weight kind");
  if (*kind == WeightKind::custom_callable) doc.fail("weight.kind", "custom-callable weights cannot be loaded from text");
  const std::string id = doc.has("weight.id") ? rd.string("weight.id") : "custom";
  ConvexFlag flag = ConvexFlag::unknown;
  if (doc.has("weight.flag")) {
    auto f = parse_convex_flag(rd.string("weight.flag"));
    if (!f) doc.fail("weight.flag", "expected convex, nonconvex or unknown");
    flag = *f;
  }
  const std::string shape = doc.has("weight.fiber.shape") ? rd.string("weight.fiber.shape") : "none";
  std::optional<DomainSpec> fiber;
  try {
    if (shape == "box") {
      std::vector<Interval> bounds;
      const auto text = rd.string("weight.fiber.bounds");
      for (auto piece : detail::split_list(text)) {
        const auto colon = piece.find(':');
        auto lo = colon == std::string_view::npos ? std::nullopt : detail::to_double(piece.substr(0, colon));
        auto hi = colon == std::string_view::npos ? std::nullopt : detail::to_double(piece.substr(colon + 1));
        if (!lo || !hi) doc.fail("weight.fiber.bounds", "expected lower:upper pairs");
        bounds.push_back({*lo, *hi});
      }
      fiber = DomainSpec::box(std::move(bounds));
    } else if (shape == "ball") {
      fiber = DomainSpec::ball(rd.integer("weight.fiber.dim"), rd.positive("weight.fiber.radius"));
    } else if (shape == "full-space") {
      fiber = DomainSpec::full_space(rd.integer("weight.fiber.dim"));
    } else if (shape != "none") {
      doc.fail("weight.fiber.shape", "expected box, ball, full-space or none");
    }
  } catch (const ArgumentError& e) {
    doc.fail("weight.fiber.shape", e.what());
  }
  try {
    return WeightSpec::make(id, *kind, rd.reals("weight.params"), fiber, flag);
  } catch (const ArgumentError& e) {
    doc.fail("weight.params", e.what());
  }
}

/// Inverse of weight_from_document for every kind except custom-callable.
inline std::string weight_to_document(const WeightSpec& w) {
  if (w.kind() == WeightKind::custom_callable) throw ArgumentError("custom-callable weights have no text form");
  std::string out = "weight.id = " + w.id() + "\nweight.kind = " + std::string(to_string(w.kind())) + "\nweight.params = ";
  for (std::size_t i = 0; i < w.params().size(); ++i) out += (i ? ", " : "") + fmt_double(w.params()[i]);
  out += "\n";
  if (!w.fiber()) {
    out += "weight.fiber.shape = none\n";
  } else {
    const auto& f = *w.fiber();
    out += "weight.fiber.shape = " + std::string(to_string(f.shape())) + "\n";
    if (f.shape() == DomainShape::box) {
      out += "weight.fiber.bounds = ";
      for (std::size_t i = 0; i < f.bounds().size(); ++i)
        out += (i ? ", " : "") + fmt_double(f.bounds()[i].lower) + ":" + fmt_double(f.bounds()[i].upper);
      out += "\n";
    } else {
      out += "weight.fiber.dim = " + std::to_string(f.dimension()) + "\n";
      if (f.shape() == DomainShape::ball) out += "weight.fiber.radius = " + fmt_double(f.radius()) + "\n";
    }
  }
  out += "weight.flag = " + std::string(to_string(w.convex_flag())) + "\n";
  return out;
}

}  // namespace prekopa
