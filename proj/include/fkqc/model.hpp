#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fkqc/linalg.hpp"

namespace fkqc {

// reduces i modulo 2M into the label interval {-M+1, ..., M}
int centered_mod(long long i, int m);

// Physical constants of the chain. The chain has 2M atoms with labels
// -M+1..M; positions repeat with period (2M+1)*a0 (one vacancy per period).
struct ModelParams {
  int M;
  double a0;
  double k0;  // misfit well stiffness
  double k1;  // nearest-neighbor spring
  double k2;  // next-nearest-neighbor spring

  // rejects M < 2, a0 <= 0, k0 <= 0, and k1+2k2 <= 2|k2|
  ModelParams(int M, double a0, double k0, double k1, double k2);

  std::size_t n() const { return static_cast<std::size_t>(2 * M); }
};

// Length-2M vector indexed by atom label; label i lives at slot i+M-1.
class ChainVector {
 public:
  explicit ChainVector(int m) : m_(m), v_(static_cast<std::size_t>(2 * m), 0.0) {}
  ChainVector(int m, std::vector<double> v);

  int chain_m() const { return m_; }
  std::size_t size() const { return v_.size(); }

  double& operator[](std::size_t slot) { return v_[slot]; }
  double operator[](std::size_t slot) const { return v_[slot]; }

  // label access; i is reduced by centered_mod first
  double& at_label(long long i) { return v_[slot_of(i)]; }
  double at_label(long long i) const { return v_[slot_of(i)]; }

  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  std::size_t slot_of(long long i) const {
    return static_cast<std::size_t>(centered_mod(i, m_) + m_ - 1);
  }
  int label_of(std::size_t slot) const { return static_cast<int>(slot) - m_ + 1; }

 private:
  int m_;
  std::vector<double> v_;
};

// Per-atom modeling flags: flag true means atom i is atomistic (delta^a_i = 1).
class Partition {
 public:
  explicit Partition(int m, bool atomistic = false)
      : m_(m), f_(static_cast<std::size_t>(2 * m), atomistic ? 1 : 0) {}

  static Partition all_atomistic(int m) { return Partition(m, true); }
  static Partition all_continuum(int m) { return Partition(m, false); }

  int chain_m() const { return m_; }
  std::size_t size() const { return f_.size(); }

  bool atomistic_slot(std::size_t slot) const { return f_[slot] != 0; }
  bool atomistic_label(long long i) const {
    return f_[static_cast<std::size_t>(centered_mod(i, m_) + m_ - 1)] != 0;
  }
  void set_slot(std::size_t slot, bool atomistic) { f_[slot] = atomistic ? 1 : 0; }
  void set_label(long long i, bool atomistic) {
    f_[static_cast<std::size_t>(centered_mod(i, m_) + m_ - 1)] = atomistic ? 1 : 0;
  }

  std::size_t count_atomistic() const;
  std::vector<int> atomistic_labels() const;  // sorted

 private:
  int m_;
  std::vector<char> f_;
};

enum class BondRole { Ea, Eac };

// Cyclic tridiagonal bond-space operator: entry off[j] couples bonds j and j+1.
struct BondMatrix {
  BondRole role;
  std::vector<double> diag;
  std::vector<double> off;

  CyclicBandedMatrix to_operator() const;
};

struct AssembledSystem {
  CyclicBandedMatrix matrix;  // D^T E D + k0 I, bandwidth 2
  ChainVector f;              // D^T E D a_ref + k0 b_ref
};

// a_ref_i = i*(2M+1)/(2M)*a0;  b_ref_i = (i-1)*a0 for i <= 0, i*a0 for i >= 1
std::pair<ChainVector, ChainVector> build_reference_vectors(const ModelParams& params);

BondMatrix assemble_bond_matrix(const ModelParams& params, const Partition& partition,
                                BondRole role);

AssembledSystem assemble_system(const ModelParams& params, const Partition& partition,
                                BondRole role);

// bond-space forward difference (Dz)_t = z_{t+1} - z_t, cyclic, and transpose
std::vector<double> apply_difference(const std::vector<double>& z);
std::vector<double> apply_difference_transpose(const std::vector<double>& w);

enum class EnergyForm {
  atomistic_matrix,
  mixed_matrix,
  atomistic_atomwise,
  mixed_atomwise,
  misfit_floor,
};

// Matrix forms evaluate 1/2 (y-a)^T D^T E D (y-a) + 1/2 k0 |y-b|^2; atomwise
// forms sum the per-atom energies; misfit_floor is the well-distance misfit
// term alone. Constant terms are dropped everywhere.
double energy(const ModelParams& params, const Partition& partition, const ChainVector& y,
              EnergyForm form);

}  // namespace fkqc
