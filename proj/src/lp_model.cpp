#include "v2g/lp_model.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace v2g {

int LPModel::add_variable(std::string name, double lo, double hi, double obj) {
  if (finalized_) throw std::logic_error("LPModel: cannot add variables after finalize");
  if (lo > hi) throw std::invalid_argument("LPModel: variable lower bound exceeds upper bound");
  const int j = static_cast<int>(lower_.size());
  if (!var_index_.emplace(name, j).second)
    throw std::invalid_argument("LPModel: duplicate variable name " + name);
  var_names_.push_back(std::move(name));
  lower_.push_back(lo);
  upper_.push_back(hi);
  obj_coeffs_.push_back(obj);
  return j;
}

int LPModel::add_row(std::string name, RowSense sense, double rhs) {
  if (finalized_) throw std::logic_error("LPModel: cannot add rows after finalize");
  const int i = static_cast<int>(rhs_.size());
  if (!con_index_.emplace(name, i).second)
    throw std::invalid_argument("LPModel: duplicate row name " + name);
  con_names_.push_back(std::move(name));
  rhs_.push_back(rhs);
  senses_.push_back(sense);
  return i;
}

void LPModel::add_coefficient(int row, int var, double value) {
  if (finalized_) throw std::logic_error("LPModel: cannot add coefficients after finalize");
  if (row < 0 || row >= static_cast<int>(rhs_.size()) || var < 0 || var >= static_cast<int>(lower_.size()))
    throw std::out_of_range("LPModel: coefficient index out of range");
  if (value != 0.0) triplets_.emplace_back(row, var, value);
}

void LPModel::finalize() {
  if (finalized_) return;
  const int m = num_rows();
  const int n = num_vars();
  A_.resize(m, n);
  A_.setFromTriplets(triplets_.begin(), triplets_.end());
  A_.makeCompressed();
  triplets_.clear();
  triplets_.shrink_to_fit();
  obj_ = Eigen::Map<const Vec>(obj_coeffs_.data(), n);
  rhs_vec_ = Eigen::Map<const Vec>(rhs_.data(), m);
  lower_vec_ = Eigen::Map<const Vec>(lower_.data(), n);
  upper_vec_ = Eigen::Map<const Vec>(upper_.data(), n);
  finalized_ = true;
}

const Eigen::SparseMatrix<double>& LPModel::matrix() const {
  if (!finalized_) throw std::logic_error("LPModel: finalize before accessing the matrix");
  return A_;
}

void LPModel::set_bounds(int var, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("LPModel: variable lower bound exceeds upper bound");
  lower_[var] = lo;
  upper_[var] = hi;
  if (finalized_) {
    lower_vec_[var] = lo;
    upper_vec_[var] = hi;
  }
}

void LPModel::set_objective_coeff(int var, double c) {
  obj_coeffs_[var] = c;
  if (finalized_) obj_[var] = c;
}

int LPModel::var(const std::string& name) const {
  auto it = var_index_.find(name);
  if (it == var_index_.end()) throw std::out_of_range("LPModel: unknown variable " + name);
  return it->second;
}

int LPModel::row(const std::string& name) const {
  auto it = con_index_.find(name);
  if (it == con_index_.end()) throw std::out_of_range("LPModel: unknown row " + name);
  return it->second;
}

Vec LPModel::row_activities(const Vec& x) const {
  if (!finalized_) throw std::logic_error("LPModel: finalize before evaluating rows");
  return A_ * x;
}

void LPModel::write_mps(std::ostream& os, const std::string& problem_name) const {
  if (!finalized_) throw std::logic_error("LPModel: finalize before export");
  os << "NAME " << problem_name << "\n";
  os << "ROWS\n";
  os << " N COST\n";
  for (int i = 0; i < num_rows(); ++i)
    os << ' ' << static_cast<char>(senses_[i]) << ' ' << con_names_[i] << "\n";
  os << "COLUMNS\n";
  for (int j = 0; j < num_vars(); ++j) {
    if (obj_[j] != 0.0)
      os << "    " << var_names_[j] << " COST " << obj_[j] << "\n";
    for (Eigen::SparseMatrix<double>::InnerIterator it(A_, j); it; ++it)
      os << "    " << var_names_[j] << ' ' << con_names_[it.row()] << ' ' << it.value() << "\n";
  }
  os << "RHS\n";
  for (int i = 0; i < num_rows(); ++i)
    if (rhs_vec_[i] != 0.0) os << "    RHS " << con_names_[i] << ' ' << rhs_vec_[i] << "\n";
  if (objective_constant != 0.0)
    os << "    RHS COST " << -objective_constant << "\n";
  os << "BOUNDS\n";
  for (int j = 0; j < num_vars(); ++j) {
    const double lo = lower_vec_[j], hi = upper_vec_[j];
    if (lo == 0.0 && hi == kInf) continue;  // default bound
    if (lo == hi) {
      os << " FX BND " << var_names_[j] << ' ' << lo << "\n";
      continue;
    }
    if (std::isinf(lo) && std::isinf(hi)) {
      os << " FR BND " << var_names_[j] << "\n";
      continue;
    }
    if (!std::isinf(lo) && lo != 0.0) os << " LO BND " << var_names_[j] << ' ' << lo << "\n";
    if (std::isinf(lo)) os << " MI BND " << var_names_[j] << "\n";
    if (!std::isinf(hi)) os << " UP BND " << var_names_[j] << ' ' << hi << "\n";
  }
  os << "ENDATA\n";
}

}  // namespace v2g
