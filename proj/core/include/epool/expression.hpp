#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epool/scenario.hpp"

namespace epool {

/// A derived view column g(X): a linear combination of factor columns and
/// absolute values of linear combinations, plus a constant.
///
/// Grammar (whitespace ignored):
///   expr   := term (('+' | '-') term)*
///   term   := ['-'] [number '*'] atom | ['-'] number
///   atom   := identifier | 'abs' '(' linear ')'
///   linear := expr without abs terms
/// Identifiers match [A-Za-z_][A-Za-z0-9_.]*.
class ColumnExpression {
 public:
  struct LinearTerm {
    double coefficient;
    std::string factor;
  };
  struct LinearCombination {
    std::vector<LinearTerm> terms;
    double constant = 0.0;
  };
  struct AbsTerm {
    double coefficient;
    LinearCombination inner;
  };

  /// Parses `text`; throws ParseError on malformed input.
  static ColumnExpression parse(const std::string& text);

  const std::string& text() const noexcept { return text_; }
  const LinearCombination& linear_part() const noexcept { return linear_; }
  const std::vector<AbsTerm>& abs_terms() const noexcept { return abs_terms_; }

  /// Names of every factor the expression reads, in first-use order.
  std::vector<std::string> referenced_factors() const;

  /// Evaluates the expression on every scenario. Throws InvalidArgument for unknown factors.
  Eigen::VectorXd evaluate(const ScenarioPanel& panel) const;

  /// Evaluates on one row of raw factor values ordered like `panel.factor_names()`.
  double evaluate_row(const ScenarioPanel& panel, const Eigen::Ref<const Eigen::RowVectorXd>& row) const;

 private:
  std::string text_;
  LinearCombination linear_;
  std::vector<AbsTerm> abs_terms_;
};

/// One ViewPanel column per expression, labelled by the expression text.
ViewPanel evaluate_view_columns(const ScenarioPanel& panel, const std::vector<ColumnExpression>& expressions);
ViewPanel evaluate_view_columns(const ScenarioPanel& panel, const std::vector<std::string>& expressions);

}  // namespace epool
