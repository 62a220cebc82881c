#include "twistecho/banded_operator.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "twistecho/errors.hpp"

namespace twistecho {
namespace {

Eigen::Index row_of(int offset, Eigen::Index t) { return t + std::max(offset, 0); }
Eigen::Index col_of(int offset, Eigen::Index t) { return t + std::max(-offset, 0); }

}  // namespace

BandedOperator::BandedOperator(SpinSystem system) : system_(system) {}

void BandedOperator::set_band(int offset, Eigen::VectorXcd values) {
  const Eigen::Index expected = dim() - std::abs(offset);
  if (expected <= 0) {
    throw StructuralError("band offset " + std::to_string(offset) + " outside a " +
                          std::to_string(dim()) + "-dimensional operator");
  }
  if (values.size() != expected) {
    throw StructuralError("band " + std::to_string(offset) + " has length " +
                          std::to_string(values.size()) + ", expected " + std::to_string(expected));
  }
  bands_[offset] = std::move(values);
}

const Eigen::VectorXcd* BandedOperator::band(int offset) const {
  auto it = bands_.find(offset);
  return it == bands_.end() ? nullptr : &it->second;
}

std::vector<int> BandedOperator::offsets() const {
  std::vector<int> out;
  out.reserve(bands_.size());
  for (const auto& [k, _] : bands_) out.push_back(k);
  return out;
}

Eigen::VectorXcd BandedOperator::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != dim()) throw StructuralError("BandedOperator::apply: dimension mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
  for (const auto& [k, values] : bands_) {
    const Eigen::Index r0 = std::max(k, 0);
    const Eigen::Index c0 = std::max(-k, 0);
    const Eigen::Index len = values.size();
    out.segment(r0, len).array() += values.array() * v.segment(c0, len).array();
  }
  return out;
}

Eigen::MatrixXcd BandedOperator::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
  for (const auto& [k, values] : bands_) {
    for (Eigen::Index t = 0; t < values.size(); ++t) m(row_of(k, t), col_of(k, t)) = values[t];
  }
  return m;
}

BandedOperator BandedOperator::adjoint() const {
  BandedOperator out(system_);
  // Entry (r, c) of band k becomes (c, r) of band -k at the same position t.
  for (const auto& [k, values] : bands_) out.bands_[-k] = values.conjugate();
  return out;
}

bool BandedOperator::is_hermitian(double tolerance) const {
  for (const auto& [k, values] : bands_) {
    const Eigen::VectorXcd* mirror = band(-k);
    if (mirror == nullptr) {
      if (values.cwiseAbs().maxCoeff() > tolerance) return false;
      continue;
    }
    if ((values - mirror->conjugate()).cwiseAbs().maxCoeff() > tolerance) return false;
  }
  return true;
}

bool BandedOperator::is_real() const {
  for (const auto& [k, values] : bands_) {
    if (values.imag().cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

Complex BandedOperator::expectation(const Eigen::VectorXcd& psi) const { return psi.dot(apply(psi)); }

Complex BandedOperator::expectation(const DickeState& state) const {
  if (!(state.system() == system_)) throw StructuralError("expectation: spin systems differ");
  return expectation(state.amplitudes());
}

BandedOperator BandedOperator::pruned() const {
  BandedOperator out(system_);
  for (const auto& [k, values] : bands_) {
    if (values.size() > 0 && values.cwiseAbs().maxCoeff() != 0.0) out.bands_[k] = values;
  }
  return out;
}

BandedOperator& BandedOperator::operator+=(const BandedOperator& other) {
  if (!(other.system_ == system_)) throw StructuralError("operator sum: spin systems differ");
  for (const auto& [k, values] : other.bands_) {
    auto it = bands_.find(k);
    if (it == bands_.end()) {
      bands_[k] = values;
    } else {
      it->second += values;
    }
  }
  return *this;
}

BandedOperator& BandedOperator::operator-=(const BandedOperator& other) {
  return *this += other * Complex(-1.0);
}

BandedOperator& BandedOperator::operator*=(Complex factor) {
  for (auto& [k, values] : bands_) values *= factor;
  return *this;
}

BandedOperator operator*(const BandedOperator& a, const BandedOperator& b) {
  if (!(a.system_ == b.system_)) throw StructuralError("operator product: spin systems differ");
  const Eigen::Index n = a.dim();
  BandedOperator out(a.system_);
  for (const auto& [ka, va] : a.bands_) {
    for (const auto& [kb, vb] : b.bands_) {
      const int k = ka + kb;
      if (std::abs(k) >= n) continue;
      auto [it, inserted] = out.bands_.try_emplace(k, Eigen::VectorXcd::Zero(n - std::abs(k)));
      Eigen::VectorXcd& target = it->second;
      // (A B)(r, c) += A(r, m) B(m, c) with r = m + ka, c = m - kb.
      for (Eigen::Index m = 0; m < n; ++m) {
        const Eigen::Index r = m + ka;
        const Eigen::Index c = m - kb;
        if (r < 0 || r >= n || c < 0 || c >= n) continue;
        const Complex av = va[m - std::max(-ka, 0)];
        const Complex bv = vb[m - std::max(kb, 0)];
        target[r - std::max(k, 0)] += av * bv;
      }
    }
  }
  return out;
}

}  // namespace twistecho
