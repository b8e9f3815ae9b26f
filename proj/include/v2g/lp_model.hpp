#pragma once

#include <Eigen/Sparse>

#include <iosfwd>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "v2g/model.hpp"

namespace v2g {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : char { LessEqual = 'L', GreaterEqual = 'G', Equal = 'E' };

// Sparse linear program
//   min c'x + c0   s.t.  A x {<=,>=,=} rhs,   lower <= x <= upper,
// with named variable and constraint indices. Built incrementally through
// add_variable/add_row and finalized into column-major sparse storage.
class LPModel {
 public:
  int add_variable(std::string name, double lo, double hi, double obj = 0.0);
  int add_row(std::string name, RowSense sense, double rhs);
  // Coefficient of variable `var` in row `row`; duplicate entries are summed.
  void add_coefficient(int row, int var, double value);

  // Builds the sparse matrix. Further structural edits are rejected.
  void finalize();
  bool finalized() const { return finalized_; }

  int num_vars() const { return static_cast<int>(lower_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

  const Eigen::SparseMatrix<double>& matrix() const;  // column-major, rows x vars

  double objective_constant = 0.0;

  const Vec& objective() const { return obj_; }
  const Vec& rhs() const { return rhs_vec_; }
  const Vec& lower() const { return lower_vec_; }
  const Vec& upper() const { return upper_vec_; }
  const std::vector<RowSense>& senses() const { return senses_; }

  // Bound edits are allowed after finalize (used to fix variables).
  void set_bounds(int var, double lo, double hi);
  void set_objective_coeff(int var, double c);

  int var(const std::string& name) const;
  int row(const std::string& name) const;
  bool has_var(const std::string& name) const { return var_index_.count(name) > 0; }
  const std::string& var_name(int j) const { return var_names_[j]; }
  const std::string& row_name(int i) const { return con_names_[i]; }
  const std::unordered_map<std::string, int>& var_index() const { return var_index_; }
  const std::unordered_map<std::string, int>& con_index() const { return con_index_; }

  Vec row_activities(const Vec& x) const;  // A*x

  // Free-format MPS export; row and column names follow the index maps.
  void write_mps(std::ostream& os, const std::string& problem_name = "V2G") const;

 private:
  std::vector<double> lower_, upper_, obj_coeffs_;
  std::vector<double> rhs_;
  std::vector<RowSense> senses_;
  std::vector<Eigen::Triplet<double>> triplets_;
  Eigen::SparseMatrix<double> A_;
  Vec obj_, rhs_vec_, lower_vec_, upper_vec_;
  std::vector<std::string> var_names_, con_names_;
  std::unordered_map<std::string, int> var_index_, con_index_;
  bool finalized_ = false;
};

}  // namespace v2g
