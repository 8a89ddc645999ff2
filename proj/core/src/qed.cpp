#include "dysonprop/qed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "dysonprop/dyson.hpp"
#include "dysonprop/evolution.hpp"
#include "dysonprop/oracle.hpp"
#include "dysonprop/random.hpp"

namespace dysonprop {

namespace {

const cplx I1{0.0, 1.0};

std::array<Eigen::Matrix2cd, 3> pauli() {
  Eigen::Matrix2cd s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, -I1, I1, 0;
  s3 << 1, 0, 0, -1;
  return {s1, s2, s3};
}

void require_finite_list(const std::vector<double>& v, const char* name) {
  for (double x : v)
    if (!std::isfinite(x)) throw InputError(std::string("QedConfig: non-finite entry in ") + name);
}

void require_finite_points(const std::vector<Vec3>& v, const char* name) {
  for (const auto& p : v)
    if (!p.allFinite()) throw InputError(std::string("QedConfig: non-finite point in ") + name);
}

const QedConfig& validated(const QedConfig& cfg) {
  cfg.validate();
  return cfg;
}

std::string photon_label(std::size_t k, int lambda) { return "k" + std::to_string(k) + "." + std::to_string(lambda); }
std::string b_label(std::size_t p, int s) { return "b" + std::to_string(p) + (s == 0 ? ".up" : ".dn"); }
std::string d_label(std::size_t p, int s) { return "d" + std::to_string(p) + (s == 0 ? ".up" : ".dn"); }

ModeSpec photon_spec(const QedConfig& cfg) {
  ModeSpec spec;
  for (std::size_t k = 0; k < cfg.momentum_points.size(); ++k)
    for (int l = 0; l < 4; ++l) {
      spec.bosons.push_back({photon_label(k, l), cfg.momentum_points[k].norm(), cfg.photon_cap});
      if (l == 0) spec.scalar_modes.push_back(photon_label(k, l));
    }
  spec.boson_cap = cfg.photon_cap;
  return spec;
}

ModeSpec fermion_spec(const QedConfig& cfg) {
  ModeSpec spec;
  for (std::size_t p = 0; p < cfg.fermion_momenta.size(); ++p) {
    const double E = std::sqrt(cfg.fermion_momenta[p].squaredNorm() + cfg.mass * cfg.mass);
    for (int s = 0; s < 2; ++s) spec.fermions.push_back({b_label(p, s), E});
    for (int s = 0; s < 2; ++s) spec.fermions.push_back({d_label(p, s), E});
  }
  return spec;
}

ModeSpec joint_spec(const QedConfig& cfg) {
  ModeSpec spec = photon_spec(cfg);
  spec.fermions = fermion_spec(cfg).fermions;
  return spec;
}

// Two-component helicity eigenvectors of sigma.n with eigenvalue +1 and -1.
std::array<Eigen::Vector2cd, 2> helicity_basis(const Vec3& p) {
  const double r = p.norm();
  double theta = 0.0, phi = 0.0;
  if (r > 0) {
    theta = std::acos(std::clamp(p.z() / r, -1.0, 1.0));
    phi = std::atan2(p.y(), p.x());
  }
  Eigen::Vector2cd up, dn;
  up << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
  dn << -std::polar(std::sin(theta / 2), -phi), std::cos(theta / 2);
  return {up, dn};
}

}  // namespace

std::array<Mat4, 4> gamma_matrices() {
  const auto s = pauli();
  std::array<Mat4, 4> g;
  g[0] = Mat4::Zero();
  g[0].diagonal() << 1, 1, -1, -1;
  for (int j = 0; j < 3; ++j) {
    g[j + 1] = Mat4::Zero();
    g[j + 1].topRightCorner<2, 2>() = s[j];
    g[j + 1].bottomLeftCorner<2, 2>() = -s[j];
  }
  return g;
}

std::array<Mat4, 4> alpha_matrices() {
  const auto g = gamma_matrices();
  std::array<Mat4, 4> a;
  for (int mu = 0; mu < 4; ++mu) a[mu] = g[0] * g[mu];
  return a;
}

Mat4 beta_matrix() { return gamma_matrices()[0]; }

std::array<Mat4, 3> spin_matrices() {
  const auto g = gamma_matrices();
  return {0.5 * I1 * g[2] * g[3], 0.5 * I1 * g[3] * g[1], 0.5 * I1 * g[1] * g[2]};
}

Eigen::Matrix4d minkowski_metric() { return Eigen::Vector4d(1, -1, -1, -1).asDiagonal(); }

DiracSpinors dirac_spinors(const Vec3& p, double M) {
  if (!(M > 0) || !std::isfinite(M)) throw DomainError("dirac_spinors: mass must be positive");
  if (!p.allFinite()) throw InputError("dirac_spinors: non-finite momentum");
  const double r = p.norm();
  const double E = std::sqrt(r * r + M * M);
  const double amp = std::sqrt((E + M) / 2.0);
  const double q = r / (E + M);
  const auto chi = helicity_basis(p);
  DiracSpinors out;
  out.energy = E;
  for (int si = 0; si < 2; ++si) {
    const double two_s = si == 0 ? 1.0 : -1.0;
    Vec4 u, v;
    u.head<2>() = amp * chi[si];
    u.tail<2>() = amp * two_s * q * chi[si];
    v.head<2>() = -amp * two_s * q * chi[si];
    v.tail<2>() = amp * chi[si];
    (si == 0 ? out.u_up : out.u_down) = u;
    (si == 0 ? out.v_up : out.v_down) = v;
  }
  return out;
}

std::array<Eigen::Vector4d, 4> polarization_vectors(const Vec3& k) {
  if (!k.allFinite()) throw InputError("polarization_vectors: non-finite momentum");
  const double r = k.norm();
  const double perp = std::hypot(k.x(), k.y());
  if (!(perp > 1e-12 * std::max(r, 1e-300)))
    throw DomainError("polarization_vectors: momentum on the z-axis lies outside K_0");
  const Vec3 kh = k / r;
  const Vec3 e1 = Vec3::UnitZ().cross(kh).normalized();
  const Vec3 e2 = kh.cross(e1);
  std::array<Eigen::Vector4d, 4> e;
  e[0] = Eigen::Vector4d(1, 0, 0, 0);
  e[1] << 0, e1;
  e[2] << 0, e2;
  e[3] << 0, kh;
  return e;
}

void QedConfig::validate() const {
  if (momentum_points.empty()) throw InputError("QedConfig: momentum_points is empty");
  if (fermion_momenta.empty()) throw InputError("QedConfig: fermion_momenta is empty");
  if (positions.empty()) throw InputError("QedConfig: positions is empty");
  require_finite_points(momentum_points, "momentum_points");
  require_finite_points(fermion_momenta, "fermion_momenta");
  require_finite_points(positions, "positions");
  auto check_weights = [](const std::vector<double>& w, std::size_t n, const char* name) {
    if (w.size() != n) throw InputError(std::string("QedConfig: ") + name + " has the wrong length");
    for (double x : w)
      if (!(x > 0) || !std::isfinite(x)) throw InputError(std::string("QedConfig: ") + name + " must be positive");
  };
  check_weights(momentum_weights, momentum_points.size(), "momentum_weights");
  check_weights(fermion_weights, fermion_momenta.size(), "fermion_weights");
  check_weights(position_weights, positions.size(), "position_weights");
  for (const auto* c : {&chi_sp, &chi_ph, &chi_el})
    if (c->size() != positions.size()) throw InputError("QedConfig: cutoff samples must match positions");
  require_finite_list(chi_sp, "chi_sp");
  require_finite_list(chi_ph, "chi_ph");
  require_finite_list(chi_el, "chi_el");
  if (!(mass > 0) || !std::isfinite(mass)) throw InputError("QedConfig: mass must be positive");
  if (!std::isfinite(coupling)) throw InputError("QedConfig: coupling must be finite");
  if (photon_cap < 1) throw InputError("QedConfig: photon_cap must be >= 1");
  for (const auto& k : momentum_points) {
    if (!(k.norm() > 0)) throw DomainError("QedConfig: photon momentum with omega(k) = 0");
    if (!(std::hypot(k.x(), k.y()) > 1e-12 * k.norm()))
      throw DomainError("QedConfig: photon momentum on the z-axis lies outside K_0");
  }
}

QedConfig default_toy_config() {
  QedConfig cfg;
  cfg.momentum_points = {Vec3(0.6, 0.0, 0.8)};
  cfg.momentum_weights = {1.0};
  cfg.fermion_momenta = {Vec3(0.3, -0.2, 0.4)};
  cfg.fermion_weights = {1.0};
  for (int i = -2; i <= 2; ++i) {
    cfg.positions.emplace_back(0.5 * i, 0.0, 0.0);
    cfg.position_weights.push_back(0.5);
  }
  for (const auto& x : cfg.positions) {
    const double r2 = x.squaredNorm();
    cfg.chi_sp.push_back(std::exp(-r2));
    cfg.chi_ph.push_back(std::exp(-r2 / 2.0));
    cfg.chi_el.push_back(std::exp(-r2 / 2.0));
  }
  cfg.mass = 1.0;
  cfg.coupling = 0.1;
  cfg.photon_cap = 3;
  return cfg;
}

cplx lattice_fourier(const QedConfig& cfg, const std::vector<double>& chi, const Vec3& k) {
  if (chi.size() != cfg.positions.size()) throw InputError("lattice_fourier: sample count mismatch");
  cplx s = 0.0;
  for (std::size_t y = 0; y < chi.size(); ++y) s += cfg.position_weights[y] * std::polar(chi[y], -k.dot(cfg.positions[y]));
  const cplx out = s * std::pow(2.0 * std::numbers::pi, -1.5);
  if (!std::isfinite(out.real()) || !std::isfinite(out.imag()))
    throw InputError("lattice_fourier: transform is not finite");
  return out;
}

QedModel::QedModel(QedConfig cfg)
    : cfg_(validated(cfg)), photons_(photon_spec(cfg_)), fermions_(fermion_spec(cfg_)), joint_(joint_spec(cfg_)) {
  const std::size_t nk = cfg_.momentum_points.size(), np = cfg_.fermion_momenta.size(), nx = cfg_.positions.size();
  for (std::size_t k = 0; k < nk; ++k) {
    omega_.push_back(cfg_.momentum_points[k].norm());
    pol_.push_back(polarization_vectors(cfg_.momentum_points[k]));
    chi_ph_hat_.push_back(lattice_fourier(cfg_, cfg_.chi_ph, cfg_.momentum_points[k]));
    std::array<Matrix, 4> ops;
    for (int l = 0; l < 4; ++l) ops[l] = boson_ops(photons_, photon_label(k, l)).annihilator.matrix();
    photon_a_.push_back(std::move(ops));
  }
  for (std::size_t p = 0; p < np; ++p) {
    energy_.push_back(std::sqrt(cfg_.fermion_momenta[p].squaredNorm() + cfg_.mass * cfg_.mass));
    chi_el_hat_.push_back(lattice_fourier(cfg_, cfg_.chi_el, cfg_.fermion_momenta[p]));
    std::array<Matrix, 2> bs, ds;
    for (int s = 0; s < 2; ++s) {
      bs[s] = fermion_ops(fermions_, b_label(p, s)).annihilator.matrix();
      ds[s] = fermion_ops(fermions_, d_label(p, s)).annihilator.matrix();
    }
    b_.push_back(std::move(bs));
    d_.push_back(std::move(ds));
  }
  eta_ph_ = eta_metric(photons_).matrix();

  const auto alpha = alpha_matrices();
  const auto nf = static_cast<Eigen::Index>(fermions_.dim());
  std::vector<DiracSpinors> sp, sp_neg;
  for (std::size_t p = 0; p < np; ++p) {
    sp.push_back(dirac_spinors(cfg_.fermion_momenta[p], cfg_.mass));
    sp_neg.push_back(dirac_spinors(-cfg_.fermion_momenta[p], cfg_.mass));
  }
  for (std::size_t x = 0; x < nx; ++x) {
    const Vector F = photon_smearing(x);
    std::array<Matrix, 4> A;
    for (int mu = 0; mu < 4; ++mu) A[mu] = a_mu(F, mu) + a_mu_dagger(F, mu);
    A_.push_back(std::move(A));

    std::array<Matrix, 4> psi;
    std::array<double, 4> pn{};
    for (int l = 0; l < 4; ++l) {
      psi[l] = Matrix::Zero(nf, nf);
      double n2 = 0.0;
      for (std::size_t p = 0; p < np; ++p) {
        const double pref = std::sqrt(cfg_.fermion_weights[p] / (2.0 * energy_[p]));
        const cplx g = std::polar(1.0, -cfg_.fermion_momenta[p].dot(cfg_.positions[x])) * chi_el_hat_[p];
        for (int s = 0; s < 2; ++s) {
          const cplx cb = pref * std::conj(g) * sp[p].u(s)(l);
          const cplx cd = pref * g * sp_neg[p].v(s)(l);
          psi[l] += cb * b_[p][s] + cd * d_[p][s].adjoint();
          n2 += std::norm(cb) + std::norm(cd);
        }
      }
      pn[l] = std::sqrt(n2);
    }
    std::array<Matrix, 4> j;
    for (int mu = 0; mu < 4; ++mu) {
      j[mu] = Matrix::Zero(nf, nf);
      for (int l = 0; l < 4; ++l)
        for (int lp = 0; lp < 4; ++lp)
          if (alpha[mu](l, lp) != 0.0) j[mu] += alpha[mu](l, lp) * psi[l].adjoint() * psi[lp];
    }
    psi_.push_back(std::move(psi));
    psi_norm_.push_back(pn);
    j_.push_back(std::move(j));
  }

  for (int mu = 0; mu < 4; ++mu) {
    double sup = 0.0;
    for (std::size_t x = 0; x < nx; ++x) sup = std::max(sup, spectral_norm(j_[x][mu]));
    M_el_ += sup;
  }
  double f2 = 0.0;
  for (std::size_t k = 0; k < nk; ++k) f2 += cfg_.momentum_weights[k] * std::norm(chi_ph_hat_[k]) / (2.0 * omega_[k]);
  M_ph_ = 2.0 * std::sqrt(f2);

  const auto n = static_cast<Eigen::Index>(joint_.dim());
  Matrix hint = Matrix::Zero(n, n);
  for (std::size_t x = 0; x < nx; ++x) {
    const double w = cfg_.coupling * cfg_.position_weights[x] * cfg_.chi_sp[x];
    if (w == 0.0) continue;
    for (int mu = 0; mu < 4; ++mu) hint += w * Matrix(Eigen::kroneckerProduct(A_[x][mu], j_[x][mu]));
  }
  H_int_.emplace(joint_.space(), std::move(hint));
  H_int_ = H_int_->certified();
  H_fr_.emplace(second_quantize(joint_));
  eta_.emplace(eta_metric(joint_));
}

Matrix QedModel::photon_annihilator(std::size_t k, int lambda) const { return photon_a_.at(k).at(lambda); }

Matrix QedModel::a_mu(const Vector& F, int mu) const {
  if (F.size() != static_cast<Eigen::Index>(omega_.size())) throw InputError("a_mu: wrong number of samples");
  const auto n = static_cast<Eigen::Index>(photons_.dim());
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    const cplx c = std::sqrt(cfg_.momentum_weights[k]) * std::conj(F(k));
    for (int l = 0; l < 4; ++l)
      if (pol_[k][l](mu) != 0.0) out += (c * pol_[k][l](mu)) * photon_a_[k][l];
  }
  return out;
}

Matrix QedModel::a_mu_dagger(const Vector& F, int mu) const { return eta_ph_ * a_mu(F, mu).adjoint() * eta_ph_; }

Matrix QedModel::a_polarization(const Vector& F, int lambda) const {
  if (F.size() != static_cast<Eigen::Index>(omega_.size())) throw InputError("a_polarization: wrong number of samples");
  const auto n = static_cast<Eigen::Index>(photons_.dim());
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < omega_.size(); ++k)
    out += (std::sqrt(cfg_.momentum_weights[k]) * std::conj(F(k))) * photon_a_[k][lambda];
  return out;
}

cplx QedModel::photon_inner_c(const Vector& F, const Vector& G) const {
  cplx s = 0.0;
  for (std::size_t k = 0; k < omega_.size(); ++k) s += cfg_.momentum_weights[k] * std::conj(F(k)) * G(k);
  return s;
}

double QedModel::photon_inner(const Vector& F, const Vector& G) const { return photon_inner_c(F, G).real(); }

Vector QedModel::photon_smearing(std::size_t x) const {
  Vector F(static_cast<Eigen::Index>(omega_.size()));
  for (std::size_t k = 0; k < omega_.size(); ++k)
    F(k) = std::polar(1.0, -cfg_.momentum_points[k].dot(cfg_.positions.at(x))) * chi_ph_hat_[k] /
           std::sqrt(2.0 * omega_[k]);
  return F;
}

Matrix QedModel::fermion_b(std::size_t p, int s_index) const { return b_.at(p).at(s_index); }
Matrix QedModel::fermion_d(std::size_t p, int s_index) const { return d_.at(p).at(s_index); }

double QedModel::psi_one_particle_norm(std::size_t x, int l) const { return psi_norm_.at(x).at(l); }

Matrix QedModel::lift_photon(const Matrix& a) const {
  const auto nf = static_cast<Eigen::Index>(fermions_.dim());
  return Eigen::kroneckerProduct(a, Matrix::Identity(nf, nf));
}

Matrix QedModel::lift_fermion(const Matrix& f) const {
  const auto nb = static_cast<Eigen::Index>(photons_.dim());
  return Eigen::kroneckerProduct(Matrix::Identity(nb, nb), f);
}

double QedModel::chi_sp_l1() const {
  double s = 0.0;
  for (std::size_t x = 0; x < cfg_.positions.size(); ++x) s += cfg_.position_weights[x] * std::abs(cfg_.chi_sp[x]);
  return s;
}

QedModel build_model(const QedConfig& cfg) { return QedModel(cfg); }

LinOp eta_adjoint(const QedModel& model, const LinOp& T) {
  require_same_space(model.eta(), T, "eta_adjoint");
  const Matrix& eta = model.eta().matrix();
  return LinOp(T.space_ptr(), eta * T.matrix().adjoint() * eta);
}

Report field_commutators(const QedModel& model, std::uint64_t seed) {
  Rng rng(seed);
  const auto nk = static_cast<Eigen::Index>(model.config().momentum_points.size());
  const auto nph = static_cast<Eigen::Index>(model.photon_basis().dim());
  const Matrix below = below_cap_projector(model.photon_basis()).matrix();
  const Eigen::Matrix4d g = minkowski_metric();
  auto normalized = [&](Vector f) {
    const double nrm = std::sqrt(model.photon_inner(f, f));
    return Vector(f / nrm);
  };
  double ccr = 0.0, cc = 0.0;
  int families = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const Vector f = normalized(random_complex(rng, nk, 1).col(0));
    const Vector h = normalized(random_complex(rng, nk, 1).col(0));
    for (const Vector* gp : {&f, &h}) {
      const cplx fg = model.photon_inner_c(f, *gp);
      for (int mu = 0; mu < 4; ++mu) {
        const Matrix a = model.a_mu(f, mu);
        for (int nu = 0; nu < 4; ++nu) {
          const Matrix ad = model.a_mu_dagger(*gp, nu);
          const Matrix a2 = model.a_mu(*gp, nu);
          const Matrix comm = a * ad - ad * a + g(mu, nu) * fg * Matrix::Identity(nph, nph);
          ccr = std::max(ccr, spectral_norm(comm * below));
          cc = std::max(cc, spectral_norm(a * a2 - a2 * a));
        }
      }
      ++families;
    }
  }
  // Anticommutators of the fermion ladder.
  const auto& fb = model.fermion_basis();
  const auto nf = static_cast<Eigen::Index>(fb.dim());
  std::vector<Matrix> ann;
  for (const auto& m : fb.spec().fermions) ann.push_back(fermion_ops(fb, m.label).annihilator.matrix());
  double car = 0.0;
  for (std::size_t i = 0; i < ann.size(); ++i)
    for (std::size_t j = 0; j < ann.size(); ++j) {
      Matrix ac = ann[i] * ann[j].adjoint() + ann[j].adjoint() * ann[i];
      if (i == j) ac -= Matrix::Identity(nf, nf);
      const Matrix aa = ann[i] * ann[j] + ann[j] * ann[i];
      car = std::max({car, ac.cwiseAbs().maxCoeff(), aa.cwiseAbs().maxCoeff()});
    }
  return make_report("field_commutators", std::max({ccr, cc, car}), 1e-14,
                     {{"ccr_below_cap", ccr},
                      {"annihilator_commutator", cc},
                      {"car", car},
                      {"families", families},
                      {"photon_cap", model.config().photon_cap},
                      {"seed", seed}});
}

Report annihilator_estimate(const QedModel& model, std::uint64_t seed, int samples) {
  Rng rng(seed);
  const auto nk = static_cast<Eigen::Index>(model.config().momentum_points.size());
  const auto nph = static_cast<Eigen::Index>(model.photon_basis().dim());
  const Eigen::VectorXd sqrt_n = boson_number_operator(model.photon_basis()).matrix().diagonal().real().cwiseSqrt();
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector f = random_complex(rng, nk, 1).col(0);
    const Vector psi = random_unit_vector(rng, nph);
    const double fnorm = std::sqrt(model.photon_inner(f, f));
    const double rhs = fnorm * (sqrt_n.cast<cplx>().cwiseProduct(psi)).norm();
    for (int mu = 0; mu < 4; ++mu) {
      const double lhs = (model.a_mu(f, mu) * psi).norm();
      worst = std::max(worst, rhs > 0 ? lhs / rhs : (lhs > 0 ? HUGE_VAL : 0.0));
    }
  }
  return make_report("annihilator_estimate", worst, 1.0 + 1e-12, {{"samples", samples}, {"seed", seed}});
}

Report interaction_relative_bound(const QedModel& model) {
  const double lhs = relative_bound_constant(model.H_int());
  const double rhs = std::abs(model.coupling()) * model.chi_sp_l1() * model.M_el() * model.M_ph();
  const double ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? HUGE_VAL : 0.0);
  return make_report("interaction_relative_bound", ratio, 1.0 + 1e-12,
                     {{"relative_bound", lhs},
                      {"lemma_bound", rhs},
                      {"M_el", model.M_el()},
                      {"M_ph", model.M_ph()},
                      {"chi_sp_l1", model.chi_sp_l1()}});
}

std::vector<Report> structure_reports(const QedModel& model) {
  std::vector<Report> out;
  const LinOp& Hint = model.H_int();
  const Matrix& eta = model.eta().matrix();
  const double shift = grade_shift_bound(Hint);
  const double dag_shift = grade_shift_bound(eta_adjoint(model, Hint));
  out.push_back(make_report("interaction_grade_shift", std::max(shift, dag_shift), 1.0,
                            {{"grade_shift", shift}, {"dagger_grade_shift", dag_shift}}));
  const double sym = spectral_norm(eta * Hint.matrix() * eta - Hint.matrix().adjoint());
  out.push_back(make_report("eta_symmetry", sym, 1e-12, {{"norm_H_int", spectral_norm(Hint.matrix())}}));
  const Matrix& Hfr = model.H_fr().matrix();
  out.push_back(make_report("eta_free_commute", (eta * Hfr * eta - Hfr).cwiseAbs().maxCoeff(), 0.0));

  double herm = 0.0, excess = 0.0;
  for (std::size_t x = 0; x < model.config().positions.size(); ++x) {
    for (int mu = 0; mu < 4; ++mu) {
      const Matrix& j = model.current(x, mu);
      herm = std::max(herm, spectral_norm(j - j.adjoint()));
    }
    for (int l = 0; l < 4; ++l)
      excess = std::max(excess, spectral_norm(model.field_psi(x, l)) - model.psi_one_particle_norm(x, l));
  }
  out.push_back(make_report("current_hermitian", herm, 1e-12, {{"M_el", model.M_el()}}));
  out.push_back(make_report("dirac_field_bound", std::max(excess, 0.0), 1e-12));
  out.push_back(interaction_relative_bound(model));
  out.push_back(annihilator_estimate(model));
  return out;
}

Report eta_unitarity_check(const QedModel& model, double t, double tol, int pairs, std::uint64_t seed) {
  if (!(tol > 0)) throw InputError("eta_unitarity_check: tol must be > 0");
  if (pairs < 1) throw InputError("eta_unitarity_check: pairs must be >= 1");
  const auto n = static_cast<Eigen::Index>(model.basis().dim());
  const Matrix& eta = model.eta().matrix();
  const double series_tol = std::min(1e-10, 1e-3 * tol);
  nlohmann::json ctx = {{"t", t}, {"pairs", pairs}, {"seed", seed}, {"series_tol", series_tol}, {"dim", n}};
  if (t == 0.0) {
    ctx["drift"] = 0.0;
    ctx["dagger_residual"] = 0.0;
    ctx["leakage"] = 0.0;
    ctx["leakage_warning"] = false;
    return make_report("eta_unitarity", 0.0, tol, ctx);
  }
  const DysonEngine engine(model.H_fr(), model.H_int());
  Rng rng(seed);
  Matrix X(n, 2 * pairs);
  for (Eigen::Index c = 0; c < X.cols(); ++c) X.col(c) = random_unit_vector(rng, n);
  const Matrix WX = apply_W(engine, t, X, series_tol);
  double drift = 0.0;
  for (int c = 0; c < pairs; ++c) {
    const cplx before = X.col(c).dot(eta * X.col(pairs + c));
    const cplx after = WX.col(c).dot(eta * WX.col(pairs + c));
    drift = std::max(drift, std::abs(after - before));
  }
  // W(t)^dagger W(t) = I with W(t)^* = U(t,0)^* e^{itH0}.
  const Matrix Y = eta * WX.leftCols(pairs);
  const Matrix back = engine.apply_block_adjoint(t, 0.0, engine.free_evolution(-t, Y), series_tol);
  const double dagger = (eta * back - X.leftCols(pairs)).colwise().norm().maxCoeff();

  // Leakage into the top photon sector from photon-vacuum states.
  const auto nf = static_cast<Eigen::Index>(model.fermion_basis().dim());
  // Run at least cap + 1 orders: lower orders cannot reach the top sector from the vacuum.
  const Matrix V0 = Matrix::Identity(n, nf);
  double L0 = 0.0;
  for (Eigen::Index c = 0; c < nf; ++c) L0 = std::max(L0, support_grade(model.H_fr().space(), V0.col(c)));
  const TimeGrid grid = engine.grid_for(L0, 1.0, 0.0, t, series_tol);
  const Matrix V = engine.free_evolution(t, engine.evolve_fixed(V0, grid, series_tol, model.config().photon_cap + 1));
  double leak = 0.0;
  for (Eigen::Index c = 0; c < nf; ++c) leak = std::max(leak, top_sector_fraction(model.basis(), V.col(c)));

  ctx["drift"] = drift;
  ctx["dagger_residual"] = dagger;
  ctx["leakage"] = leak;
  ctx["leakage_warning"] = leak > 1e-6;
  ctx["photon_cap"] = model.config().photon_cap;
  return make_report("eta_unitarity", std::max(drift, dagger), tol, ctx);
}

}  // namespace dysonprop
