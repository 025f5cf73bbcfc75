#include "pencert/problem.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <variant>

#include "pencert/errors.hpp"

namespace pencert {

namespace {

// ---------------------------------------------------------------------------
// Problem file reader: [section] headers and `key = value` lines, where a
// value is a number, a "quoted string", or a [v, v, ...] array of those.
// '#' starts a comment outside quotes.
// ---------------------------------------------------------------------------

struct FileValue {
  using Item = std::variant<double, std::string>;
  std::optional<double> number;
  std::optional<std::string> string;
  std::optional<std::vector<Item>> array;
};

class ValueParser {
 public:
  explicit ValueParser(const std::string& text) : text_(text) {}

  FileValue run(int line_no) {
    line_no_ = line_no;
    skip_ws();
    FileValue v = value();
    skip_ws();
    if (pos_ < text_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw FormatError("line " + std::to_string(line_no_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  FileValue value() {
    FileValue v;
    skip_ws();
    if (pos_ >= text_.size()) fail("missing value");
    char c = text_[pos_];
    if (c == '"') {
      v.string = quoted();
    } else if (c == '[') {
      ++pos_;
      std::vector<FileValue::Item> items;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
      } else {
        for (;;) {
          skip_ws();
          if (pos_ >= text_.size()) fail("unterminated array");
          if (text_[pos_] == '"')
            items.emplace_back(quoted());
          else
            items.emplace_back(number());
          skip_ws();
          if (pos_ < text_.size() && text_[pos_] == ',') {
            ++pos_;
            continue;
          }
          if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            break;
          }
          fail("expected ',' or ']' in array");
        }
      }
      v.array = std::move(items);
    } else {
      v.number = number();
    }
    return v;
  }

  std::string quoted() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') out.push_back(text_[pos_++]);
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;  // closing quote
    return out;
  }

  double number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != ',' && text_[pos_] != ']')
      ++pos_;
    std::string token = text_.substr(start, pos_ - start);
    try {
      std::size_t used = 0;
      double val = std::stod(token, &used);
      if (used != token.size()) fail("malformed number '" + token + "'");
      return val;
    } catch (const std::exception&) {
      fail("malformed number '" + token + "'");
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

struct FileEntry {
  FileValue value;
  int line_no = 0;
  bool used = false;
};

using Section = std::map<std::string, FileEntry>;

std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::map<std::string, Section> read_sections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file: " + path.string());

  std::map<std::string, Section> sections;
  std::string current;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        throw FormatError("line " + std::to_string(line_no) + ": malformed section header");
      current = trim(body.substr(1, body.size() - 2));
      if (current.empty())
        throw FormatError("line " + std::to_string(line_no) + ": empty section name");
      sections[current];
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw FormatError("line " + std::to_string(line_no) + ": expected 'key = value'");
    if (current.empty())
      throw FormatError("line " + std::to_string(line_no) + ": entry outside any section");
    std::string key = trim(body.substr(0, eq));
    std::string rest = body.substr(eq + 1);
    if (key.empty()) throw FormatError("line " + std::to_string(line_no) + ": empty key");
    auto& section = sections[current];
    if (section.count(key))
      throw FormatError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    section[key] = FileEntry{ValueParser(rest).run(line_no), line_no, false};
  }
  return sections;
}

FileEntry* find(Section& s, const std::string& key) {
  auto it = s.find(key);
  if (it == s.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

double require_number(Section& s, const std::string& section, const std::string& key) {
  FileEntry* e = find(s, key);
  if (!e || !e->value.number)
    throw FormatError("[" + section + "] is missing numeric field '" + key + "'");
  return *e->value.number;
}

std::string require_string(Section& s, const std::string& section, const std::string& key) {
  FileEntry* e = find(s, key);
  if (!e || !e->value.string)
    throw FormatError("[" + section + "] is missing string field '" + key + "'");
  return *e->value.string;
}

std::vector<std::string> string_array(Section& s, const std::string& key) {
  FileEntry* e = find(s, key);
  if (!e) return {};
  if (!e->value.array) throw FormatError("field '" + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& item : *e->value.array) {
    const auto* str = std::get_if<std::string>(&item);
    if (!str) throw FormatError("field '" + key + "' must contain only strings");
    out.push_back(*str);
  }
  return out;
}

std::optional<std::vector<double>> number_array(Section& s, const std::string& key,
                                                bool allow_inf_names) {
  FileEntry* e = find(s, key);
  if (!e) return std::nullopt;
  if (!e->value.array) throw FormatError("field '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& item : *e->value.array) {
    if (const auto* num = std::get_if<double>(&item)) {
      out.push_back(*num);
      continue;
    }
    const std::string& str = std::get<std::string>(item);
    if (allow_inf_names && str == "-inf")
      out.push_back(-std::numeric_limits<double>::infinity());
    else if (allow_inf_names && str == "+inf")
      out.push_back(std::numeric_limits<double>::infinity());
    else
      throw FormatError("field '" + key + "': bad entry \"" + str + "\"");
  }
  return out;
}

void reject_unused(const Section& s, const std::string& section) {
  for (const auto& [key, entry] : s)
    if (!entry.used)
      throw FormatError("line " + std::to_string(entry.line_no) + ": unknown key '" + key +
                        "' in [" + section + "]");
}

// Parse errors propagate as their own types; they already carry the byte
// offset within the expression text.
std::vector<ExprPtr> parse_all(const std::vector<std::string>& texts, int dim) {
  std::vector<ExprPtr> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) out.push_back(parse(text, dim));
  return out;
}

}  // namespace

LoadedProblem load_problem(const std::filesystem::path& path) {
  auto sections = read_sections(path);

  auto prob_it = sections.find("problem");
  if (prob_it == sections.end()) throw FormatError("missing [problem] section");
  Section& prob = prob_it->second;

  LoadedProblem out;
  ProblemInstance& p = out.problem;

  double dim_raw = require_number(prob, "problem", "dim");
  if (dim_raw < 1 || dim_raw != std::floor(dim_raw))
    throw FormatError("dim must be a positive integer");
  p.dim = static_cast<int>(dim_raw);

  p.objective = parse(require_string(prob, "problem", "objective"), p.dim);
  p.inequalities = parse_all(string_array(prob, "inequalities"), p.dim);
  p.equalities = parse_all(string_array(prob, "equalities"), p.dim);
  p.set_constraints = parse_all(string_array(prob, "set_constraints"), p.dim);

  auto lower = number_array(prob, "set_lower", /*allow_inf_names=*/true);
  auto upper = number_array(prob, "set_upper", /*allow_inf_names=*/true);
  p.box_lower = Vec::Constant(p.dim, -std::numeric_limits<double>::infinity());
  p.box_upper = Vec::Constant(p.dim, std::numeric_limits<double>::infinity());
  if (lower) {
    if (static_cast<int>(lower->size()) != p.dim)
      throw FormatError("set_lower must have length dim");
    for (int i = 0; i < p.dim; ++i) p.box_lower[i] = (*lower)[i];
  }
  if (upper) {
    if (static_cast<int>(upper->size()) != p.dim)
      throw FormatError("set_upper must have length dim");
    for (int i = 0; i < p.dim; ++i) p.box_upper[i] = (*upper)[i];
  }
  for (int i = 0; i < p.dim; ++i)
    if (!(p.box_lower[i] <= p.box_upper[i]))
      throw FormatError("set_lower exceeds set_upper at component " + std::to_string(i + 1));

  if (FileEntry* e = find(prob, "lipschitz")) {
    if (!e->value.number || !(*e->value.number > 0.0) || !std::isfinite(*e->value.number))
      throw FormatError("lipschitz must be a positive real");
    p.lipschitz = *e->value.number;
  }
  reject_unused(prob, "problem");

  auto cand_it = sections.find("candidate");
  if (cand_it == sections.end()) throw FormatError("missing [candidate] section");
  Section& cand = cand_it->second;

  auto point = number_array(cand, "point", /*allow_inf_names=*/false);
  if (!point) throw FormatError("[candidate] is missing field 'point'");
  if (static_cast<int>(point->size()) != p.dim)
    throw FormatError("candidate point must have length dim");
  for (double v : *point)
    if (!std::isfinite(v)) throw FormatError("candidate point must be finite");
  out.candidate.x_bar = Eigen::Map<const Vec>(point->data(), p.dim);

  out.candidate.delta = require_number(cand, "candidate", "delta");
  if (!(out.candidate.delta > 0.0) || !std::isfinite(out.candidate.delta))
    throw FormatError("delta must be a positive real");
  if (FileEntry* e = find(cand, "feas_tol")) {
    if (!e->value.number || !(*e->value.number > 0.0) || !std::isfinite(*e->value.number))
      throw FormatError("feas_tol must be a positive real");
    out.candidate.feas_tol = *e->value.number;
  }
  reject_unused(cand, "candidate");

  for (const auto& [name, section] : sections)
    if (name != "problem" && name != "candidate")
      throw FormatError("unknown section [" + name + "]");

  Classification cls = classify(p, out.candidate.x_bar, out.candidate.feas_tol);
  if (!cls.in_S)
    throw FormatError("candidate point is not feasible: fails " +
                      std::string(!cls.in_X  ? "membership in X"
                                  : !cls.in_G ? "an inequality constraint"
                                              : "the equality constraints"));
  return out;
}

Classification classify(const ProblemInstance& p, const Vec& x, double tol) {
  if (x.size() != p.dim) throw Error("classify: point has wrong dimension");
  Classification c;

  c.in_X = true;
  for (int i = 0; i < p.dim; ++i)
    if (x[i] < p.box_lower[i] - tol || x[i] > p.box_upper[i] + tol) c.in_X = false;
  for (const auto& constr : p.set_constraints)
    if (evaluate(*constr, x) > tol) c.in_X = false;

  bool g_ok = true;
  for (std::size_t i = 0; i < p.inequalities.size(); ++i) {
    double gi = evaluate(*p.inequalities[i], x);
    if (gi > tol) g_ok = false;
    if (std::abs(gi) <= tol) c.active_set.push_back(static_cast<int>(i + 1));
  }
  c.in_G = c.in_X && g_ok;
  c.in_S = c.in_G && h_aggregate(p, x) <= tol * tol;
  return c;
}

double h_aggregate(const ProblemInstance& p, const Vec& x) {
  double sum = 0.0;
  for (const auto& h : p.equalities) {
    double v = evaluate(*h, x);
    sum += v * v;
  }
  return sum;
}

double evaluate_objective(const ProblemInstance& p, const Vec& x) {
  return evaluate(*p.objective, x);
}

namespace {

template <typename Member>
SetOracle guarded(Member member) {
  // Evaluation failures mean the point is outside the expression's domain,
  // hence outside the set.
  return [member = std::move(member)](const Vec& x) {
    try {
      return member(x);
    } catch (const DomainError&) {
      return false;
    }
  };
}

}  // namespace

SetOracle membership_X(const ProblemInstance& p, double tol) {
  return guarded([&p, tol](const Vec& x) { return classify(p, x, tol).in_X; });
}

SetOracle membership_G(const ProblemInstance& p, double tol) {
  return guarded([&p, tol](const Vec& x) { return classify(p, x, tol).in_G; });
}

SetOracle membership_S(const ProblemInstance& p, double tol) {
  return guarded([&p, tol](const Vec& x) { return classify(p, x, tol).in_S; });
}

ScalarFn objective_fn(const ProblemInstance& p) {
  return [&p](const Vec& x) { return evaluate(*p.objective, x); };
}

ScalarFn h_fn(const ProblemInstance& p) {
  return [&p](const Vec& x) { return h_aggregate(p, x); };
}

}  // namespace pencert
