#include "epool/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

#include "epool/error.hpp"

namespace epool {

namespace {

class Parser {
 public:
  // U+2212 MINUS SIGN is accepted as '-'.
  explicit Parser(std::string text) : text_(std::move(text)) {
    for (std::size_t at = text_.find("\xE2\x88\x92"); at != std::string::npos; at = text_.find("\xE2\x88\x92", at))
      text_.replace(at, 3, "-");
  }

  ColumnExpression::LinearCombination parse_expression(std::vector<ColumnExpression::AbsTerm>* abs_terms) {
    ColumnExpression::LinearCombination result;
    bool first = true;
    while (true) {
      skip_ws();
      double sign = 1.0;
      if (first) {
        if (consume('-')) sign = -1.0;
        else consume('+');
      } else {
        if (consume('+')) sign = 1.0;
        else if (consume('-')) sign = -1.0;
        else break;
      }
      first = false;
      parse_term(sign, result, abs_terms);
    }
    return result;
  }

  void expect_end() {
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + text_ + "' at position " + std::to_string(pos_) + ": " + what);
  }

 private:
  void parse_term(double sign, ColumnExpression::LinearCombination& out,
                  std::vector<ColumnExpression::AbsTerm>* abs_terms) {
    skip_ws();
    if (consume('-')) sign = -sign;
    skip_ws();
    double coefficient = sign;
    if (auto number = parse_number()) {
      skip_ws();
      if (!consume('*')) {
        out.constant += sign * *number;
        return;
      }
      coefficient *= *number;
      skip_ws();
    }
    const std::string name = parse_identifier();
    if (name.empty()) fail("expected a factor name or abs(...)");
    skip_ws();
    if (name == "abs" && peek() == '(') {
      if (abs_terms == nullptr) fail("abs(...) cannot be nested");
      consume('(');
      auto inner = parse_expression(nullptr);
      skip_ws();
      if (!consume(')')) fail("expected ')'");
      if (inner.terms.empty()) fail("abs(...) needs at least one factor");
      abs_terms->push_back({coefficient, std::move(inner)});
      return;
    }
    skip_ws();
    if (consume('*')) {
      skip_ws();
      auto number = parse_number();
      if (!number) fail("expected a number after '*'");
      coefficient *= *number;
    }
    out.terms.push_back({coefficient, name});
  }

  std::optional<double> parse_number() {
    skip_ws();
    if (pos_ >= text_.size()) return std::nullopt;
    const char c = text_[pos_];
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.') return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  std::string parse_identifier() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '.')) {
        ++pos_;
      }
    }
    return text_.substr(start, pos_ - start);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string text_;
  std::size_t pos_ = 0;
};

double evaluate_linear(const ColumnExpression::LinearCombination& lc, const std::vector<std::size_t>& idx,
                       const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  double v = lc.constant;
  for (std::size_t t = 0; t < lc.terms.size(); ++t) {
    v += lc.terms[t].coefficient * row[static_cast<Eigen::Index>(idx[t])];
  }
  return v;
}

Eigen::VectorXd evaluate_linear(const ColumnExpression::LinearCombination& lc, const ScenarioPanel& panel) {
  Eigen::VectorXd v = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(panel.num_scenarios()), lc.constant);
  for (const auto& term : lc.terms) {
    v += term.coefficient * panel.data().col(static_cast<Eigen::Index>(panel.factor_index(term.factor)));
  }
  return v;
}

}  // namespace

ColumnExpression ColumnExpression::parse(const std::string& text) {
  Parser parser(text);
  ColumnExpression expr;
  expr.text_ = text;
  expr.linear_ = parser.parse_expression(&expr.abs_terms_);
  parser.expect_end();
  if (expr.linear_.terms.empty() && expr.abs_terms_.empty()) parser.fail("expression references no factor");
  return expr;
}

std::vector<std::string> ColumnExpression::referenced_factors() const {
  std::vector<std::string> names;
  auto add = [&](const std::string& n) {
    for (const auto& existing : names) {
      if (existing == n) return;
    }
    names.push_back(n);
  };
  for (const auto& t : linear_.terms) add(t.factor);
  for (const auto& a : abs_terms_) {
    for (const auto& t : a.inner.terms) add(t.factor);
  }
  return names;
}

Eigen::VectorXd ColumnExpression::evaluate(const ScenarioPanel& panel) const {
  Eigen::VectorXd v = evaluate_linear(linear_, panel);
  for (const auto& a : abs_terms_) {
    v += a.coefficient * evaluate_linear(a.inner, panel).cwiseAbs();
  }
  return v;
}

double ColumnExpression::evaluate_row(const ScenarioPanel& panel,
                                      const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  auto indices = [&](const LinearCombination& lc) {
    std::vector<std::size_t> idx;
    idx.reserve(lc.terms.size());
    for (const auto& t : lc.terms) idx.push_back(panel.factor_index(t.factor));
    return idx;
  };
  double v = evaluate_linear(linear_, indices(linear_), row);
  for (const auto& a : abs_terms_) v += a.coefficient * std::abs(evaluate_linear(a.inner, indices(a.inner), row));
  return v;
}

ViewPanel evaluate_view_columns(const ScenarioPanel& panel, const std::vector<ColumnExpression>& expressions) {
  ViewPanel out;
  out.columns.resize(static_cast<Eigen::Index>(panel.num_scenarios()), static_cast<Eigen::Index>(expressions.size()));
  out.labels.reserve(expressions.size());
  for (std::size_t k = 0; k < expressions.size(); ++k) {
    out.columns.col(static_cast<Eigen::Index>(k)) = expressions[k].evaluate(panel);
    out.labels.push_back(expressions[k].text());
  }
  return out;
}

ViewPanel evaluate_view_columns(const ScenarioPanel& panel, const std::vector<std::string>& expressions) {
  std::vector<ColumnExpression> parsed;
  parsed.reserve(expressions.size());
  for (const auto& e : expressions) parsed.push_back(ColumnExpression::parse(e));
  return evaluate_view_columns(panel, parsed);
}

}  // namespace epool
