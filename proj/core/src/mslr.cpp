#include "schurlr/mslr.hpp"

#include <chrono>
#include <ostream>
#include <string>

#include "schurlr/krylov.hpp"

namespace schurlr {

void MslrParams::validate() const {
  if (levels < 1) throw std::invalid_argument("mslr: levels must be >= 1");
  if (parts < 1) throw std::invalid_argument("mslr: parts must be >= 1");
  if (rank < 0) throw std::invalid_argument("mslr: rank must be >= 0");
  if (tau < 0) throw std::invalid_argument("mslr: tau must be >= 0");
  if (lfil < 0) throw std::invalid_argument("mslr: lfil must be >= 0");
  if (max_cycles < 1) throw std::invalid_argument("mslr: max_cycles must be >= 1");
  if (root_inner_iters < 0) throw std::invalid_argument("mslr: root_inner_iters must be >= 0");
  if (shift_factor < 0) throw std::invalid_argument("mslr: shift_factor must be >= 0");
  if (last_level_blocks < 0) throw std::invalid_argument("mslr: last_level_blocks must be >= 0");
}

MslrPreconditioner MslrPreconditioner::setup(const CsrMatrix<Real>& a, const MslrParams& params, Fabric* fabric) {
  return setup(convert<Complex>(a), params, fabric);
}

MslrPreconditioner MslrPreconditioner::setup(const CsrMatrix<Complex>& a, const MslrParams& params,
                                             Fabric* fabric) {
  params.validate();
  if (a.rows() != a.cols()) throw DimensionMismatch("mslr setup: matrix not square");
  const auto t0 = std::chrono::steady_clock::now();
  MslrPreconditioner m;
  m.params_ = params;
  m.n_ = a.rows();
  m.nnz_a_ = a.nnz();
  m.ordering_ = multilevel_reorder(a, params.levels, params.parts);
  const int nlev = m.ordering_.achieved_levels();

  CsrMatrix<Complex> c = a;
  for (int l = 0; l < nlev; ++l) {
    const LevelOrdering& lo = m.ordering_.levels[l];
    MslrLevel lev;
    lev.size = lo.size;
    lev.interior = lo.interior_size();
    lev.perm = lo.perm;
    lev.offsets.assign(1, 0);
    for (Index d : lo.part_sizes) lev.offsets.push_back(lev.offsets.back() + d);
    const CsrMatrix<Complex> al = permute_symmetric(c, std::span<const Index>(lev.perm));
    const Index d = lev.interior, n = lev.size;
    lev.B = extract_block(al, 0, d, 0, d);
    lev.F = extract_block(al, 0, d, d, n);
    lev.E = extract_block(al, d, n, 0, d);
    lev.C = extract_block(al, d, n, d, n);
    for (std::size_t j = 0; j + 1 < lev.offsets.size(); ++j) {
      const Index b0 = lev.offsets[j], b1 = lev.offsets[j + 1];
      lev.E_parts.push_back(extract_block(lev.E, 0, n - d, b0, b1));
      try {
        lev.factors.push_back(ilut(extract_block(lev.B, b0, b1, b0, b1), params.tau, params.lfil,
                                   params.shift_factor));
      } catch (const ZeroPivotError& e) {
        throw NumericalError("mslr setup: level " + std::to_string(l) + ", block " + std::to_string(j) + ": " +
                             e.what());
      }
    }
    lev.term = zero_term(n - d);
    c = lev.C;
    m.levels_.push_back(std::move(lev));
  }
  try {
    m.last_ = BlockJacobi<Complex>::build(c, params.jacobi_blocks(), params.tau, params.lfil, params.shift_factor);
  } catch (const NumericalError& e) {
    throw NumericalError("mslr setup: last level: " + std::string(e.what()));
  }

  m.stats_.resize(nlev);
  for (int l = nlev - 1; l >= 0; --l) {
    MslrLevel& lev = m.levels_[l];
    MslrLevelStats& st = m.stats_[l];
    st.size = lev.size;
    st.interior = lev.interior;
    st.interface = lev.interface();
    for (const auto& f : lev.factors) st.factor_nnz += f.nnz();
    const Index s = lev.interface();
    if (params.rank == 0 || s == 0) continue;
    const std::int64_t before = fabric ? fabric->trace().allreduce_count : 0;
    const MslrPreconditioner& self = m;
    auto op = [&self, l, fabric](const Vector<Complex>& z) { return self.ghat_matvec(l, z, fabric); };
    SchurVectorsResult sv = restarted_schur_vectors(op, s, std::min(params.rank, s), params.max_cycles, fabric);
    lev.term = std::move(sv.term);
    st.rank = lev.term.rank();
    st.cycles = sv.cycles;
    st.arnoldi_steps = sv.steps;
    st.converged = sv.converged;
    st.arnoldi_allreduces = fabric ? fabric->trace().allreduce_count - before : 0;
  }
  m.setup_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return m;
}

Vector<Complex> MslrPreconditioner::b_solve(const MslrLevel& lev, std::span<const Complex> x) const {
  Vector<Complex> out(x.begin(), x.end());
  for (std::size_t j = 0; j < lev.factors.size(); ++j) {
    const Index b0 = lev.offsets[j], b1 = lev.offsets[j + 1];
    if (b1 > b0) lu_solve_inplace(lev.factors[j], std::span<Complex>(out).subspan(b0, b1 - b0));
  }
  return out;
}

// Each part owns a column slice of E; the interface vector is the sum of
// the per-part products.
Vector<Complex> MslrPreconditioner::e_product(const MslrLevel& lev, std::span<const Complex> z1,
                                              Fabric* fabric) const {
  std::vector<Vector<Complex>> contrib;
  contrib.reserve(lev.E_parts.size());
  for (std::size_t j = 0; j < lev.E_parts.size(); ++j) {
    const Index b0 = lev.offsets[j], b1 = lev.offsets[j + 1];
    contrib.push_back(spmv(lev.E_parts[j], z1.subspan(b0, b1 - b0)));
  }
  return reduce_sum<Complex>(fabric, contrib);
}

Vector<Complex> MslrPreconditioner::lower(int l, std::span<const Complex> z, Fabric* fabric) const {
  if (l + 1 < levels()) return solve_level(l + 1, z, fabric);
  return last_.apply(z);
}

Vector<Complex> MslrPreconditioner::ghat_matvec(int l, std::span<const Complex> z, Fabric* fabric) const {
  const MslrLevel& lev = level(l);
  require_same_size(z.size(), lev.interface(), "mslr ghat_matvec");
  const Vector<Complex> y = lower(l, z, fabric);
  const Vector<Complex> u = b_solve(lev, spmv(lev.F, std::span<const Complex>(y)));
  return e_product(lev, u, fabric);
}

// (C_0 - E_0 B_0^{-1} F_0) z with the incomplete factors of B_0.
Vector<Complex> MslrPreconditioner::schur_matvec(std::span<const Complex> z, Fabric* fabric) const {
  const MslrLevel& lev = levels_.front();
  Vector<Complex> out = spmv(lev.C, z);
  const Vector<Complex> u = b_solve(lev, spmv(lev.F, z));
  const Vector<Complex> eu = e_product(lev, u, fabric);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= eu[i];
  return out;
}

Vector<Complex> MslrPreconditioner::solve_level(int l, std::span<const Complex> b, Fabric* fabric) const {
  const MslrLevel& lev = levels_[l];
  const Index d = lev.interior, n = lev.size;
  Vector<Complex> x(n);
  for (Index i = 0; i < n; ++i) x[i] = b[lev.perm[i]];
  const std::span<const Complex> xs(x);

  const Vector<Complex> z1 = b_solve(lev, xs.first(d));
  const Vector<Complex> ez = e_product(lev, z1, fabric);
  Vector<Complex> z2(xs.begin() + d, xs.end());
  for (Index i = 0; i < n - d; ++i) z2[i] -= ez[i];

  auto lowrank_path = [this, l, &lev, fabric](const Vector<Complex>& v) {
    Vector<Complex> w = apply_correction(lev.term, v, fabric);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += v[i];
    return lower(l, w, fabric);
  };
  Vector<Complex> y2;
  if (l == 0 && params_.root_inner_iters > 0 && n > d) {
    KrylovParams kp;
    kp.restart = params_.root_inner_iters;
    kp.maxit = params_.root_inner_iters;
    kp.tol = 1e-14;
    auto s_op = [this, fabric](const Vector<Complex>& v) { return schur_matvec(v, fabric); };
    y2 = gmres_right<Complex>(s_op, lowrank_path, z2, kp, {}, fabric).x;
  } else {
    y2 = lowrank_path(z2);
  }

  const Vector<Complex> fy = b_solve(lev, spmv(lev.F, std::span<const Complex>(y2)));
  Vector<Complex> out(n);
  for (Index i = 0; i < d; ++i) out[lev.perm[i]] = z1[i] - fy[i];
  for (Index i = d; i < n; ++i) out[lev.perm[i]] = y2[i - d];
  return out;
}

Vector<Complex> MslrPreconditioner::apply(int l, std::span<const Complex> b, Fabric* fabric) const {
  if (l < 0 || l >= levels()) throw std::out_of_range("mslr apply: level out of range");
  require_same_size(b.size(), levels_[l].size, "mslr apply");
  if (fabric) fabric->record_allreduce(static_cast<Index>(b.size()));
  return solve_level(l, b, fabric);
}

LinearOperator<Complex> MslrPreconditioner::as_operator(Fabric* fabric) const {
  return [this, fabric](const Vector<Complex>& b) { return apply(b, fabric); };
}

Real MslrPreconditioner::fill() const {
  Index total = last_.nnz();
  for (const auto& lev : levels_) {
    for (const auto& f : lev.factors) total += f.nnz();
    if (lev.term.rank() > 0) total += lev.term.nnz();
  }
  return nnz_a_ == 0 ? 0.0 : static_cast<Real>(total) / static_cast<Real>(nnz_a_);
}

CommPrediction predict_comm(const MslrParams& params, int l) {
  params.validate();
  if (l < 0 || l >= params.levels) throw std::out_of_range("predict_comm: level out of range");
  const std::int64_t below = params.levels - l;
  CommPrediction p;
  if (params.rank > 0) {
    p.apply_allreduce = 2 * below + 1;
    p.arnoldi_per_step = 2 * below + 1;
  } else {
    p.apply_allreduce = below + 1;
  }
  return p;
}

void write_level_stats_csv(std::ostream& out, std::span<const MslrLevelStats> stats) {
  out << "level,size,interior,interface,rank,cycles,arnoldi_steps,arnoldi_allreduces,factor_nnz\n";
  for (std::size_t l = 0; l < stats.size(); ++l) {
    const auto& s = stats[l];
    out << l << ',' << s.size << ',' << s.interior << ',' << s.interface << ',' << s.rank << ',' << s.cycles << ','
        << s.arnoldi_steps << ',' << s.arnoldi_allreduces << ',' << s.factor_nnz << '\n';
  }
}

}  // namespace schurlr
