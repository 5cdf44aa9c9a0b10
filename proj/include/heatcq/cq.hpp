#pragma once

// Convolution quadrature engine: BDF and Radau IIA symbols, contour
// parameters, scaled-DFT transforms, forward discrete convolutions, CQ
// weights, and the all-at-once frequency-decoupled convolution solve.
//
// All transforms use the contour nodes zeta_l = R exp(-2 pi i l / N_zeta);
// the symbol at a node is delta(zeta_l)/k (a scalar for BDF, an s x s matrix
// for Runge-Kutta methods, handled through its eigendecomposition).
// Operator families are assumed real in the time domain, i.e.
// F(conj(s)) = conj(F(s)), so only half of the contour is evaluated.

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "heatcq/errors.hpp"
#include "heatcq/parallel.hpp"

namespace heatcq {

using Complex = std::complex<double>;

struct RungeKuttaTableau {
    Eigen::MatrixXd q;  // coefficient matrix (s x s)
    Eigen::VectorXd b;  // quadrature weights, equal to the last row of q
    Eigen::VectorXd c;  // nodes, c = q * 1
    int stages = 0;
    int classical_order = 0;
    int stage_order = 0;
};

// Radau IIA collocation tableaus: order 2s-1, stage order s, A-stable,
// stiffly accurate, invertible q.
[[nodiscard]] inline RungeKuttaTableau radau_iia(int stages) {
    RungeKuttaTableau t;
    t.stages = stages;
    t.classical_order = 2 * stages - 1;
    t.stage_order = stages;
    if (stages == 2) {
        t.q.resize(2, 2);
        t.q << 5.0 / 12.0, -1.0 / 12.0, 3.0 / 4.0, 1.0 / 4.0;
        t.c.resize(2);
        t.c << 1.0 / 3.0, 1.0;
    } else if (stages == 3) {
        const double r6 = std::sqrt(6.0);
        t.q.resize(3, 3);
        t.q << (88.0 - 7.0 * r6) / 360.0, (296.0 - 169.0 * r6) / 1800.0, (-2.0 + 3.0 * r6) / 225.0,
            (296.0 + 169.0 * r6) / 1800.0, (88.0 + 7.0 * r6) / 360.0, (-2.0 - 3.0 * r6) / 225.0,
            (16.0 - r6) / 36.0, (16.0 + r6) / 36.0, 1.0 / 9.0;
        t.c.resize(3);
        t.c << (4.0 - r6) / 10.0, (4.0 + r6) / 10.0, 1.0;
    } else {
        throw std::invalid_argument("radau_iia: stages must be 2 or 3");
    }
    t.b = t.q.row(stages - 1).transpose();
    return t;
}

// BDF generating symbol delta(zeta) = sum_{j=1}^q (1 - zeta)^j / j.
[[nodiscard]] inline Complex bdf_delta(int q, const Complex& zeta) {
    if (q < 1 || q > 6) throw std::invalid_argument("bdf_delta: order must be in 1..6");
    Complex sum = 0.0;
    Complex pow = 1.0;
    for (int j = 1; j <= q; ++j) {
        pow *= (1.0 - zeta);
        sum += pow / static_cast<double>(j);
    }
    return sum;
}

// Runge-Kutta matrix symbol delta(zeta) = Q^{-1} - zeta Q^{-1} 1 b^T Q^{-1};
// for stiffly accurate methods b^T Q^{-1} = e_s^T, so the second term only
// touches the last column.
[[nodiscard]] inline Eigen::MatrixXcd rk_delta(const RungeKuttaTableau& t, const Complex& zeta) {
    const Eigen::MatrixXd qinv = t.q.inverse();
    const Eigen::VectorXd qinv_one = qinv * Eigen::VectorXd::Ones(t.stages);
    const Eigen::RowVectorXd btqinv = t.b.transpose() * qinv;
    Eigen::MatrixXcd d = qinv.cast<Complex>();
    d -= zeta * (qinv_one * btqinv).cast<Complex>();
    return d;
}

// Stability function r(z) = 1 + z b^T (I - zQ)^{-1} 1.
[[nodiscard]] inline Complex rk_stability(const RungeKuttaTableau& t, const Complex& z) {
    const Eigen::MatrixXcd m =
        Eigen::MatrixXcd::Identity(t.stages, t.stages) - z * t.q.cast<Complex>();
    const Eigen::VectorXcd y = m.lu().solve(Eigen::VectorXcd::Ones(t.stages));
    return 1.0 + z * t.b.cast<Complex>().dot(y);
}

enum class CQFamily { BDF, RadauIIA };

// A time discretization: the method symbol plus step size and step count.
// Histories are indexed by sample node: BDF stores steps t_0..t_N (N+1
// entries); Runge-Kutta stores the stage vectors of steps 0..N-1 (N entries,
// each holding s stages at times t_n + c_i k; the last stage of step n-1 is
// the step value at t_n by stiff accuracy).
class CQScheme {
  public:
    [[nodiscard]] static CQScheme bdf(int order, double step, int steps) {
        if (order < 1 || order > 6)
            throw std::invalid_argument("CQScheme::bdf: order must be in 1..6");
        CQScheme s;
        s.family_ = CQFamily::BDF;
        s.bdf_order_ = order;
        s.init_grid(step, steps);
        return s;
    }

    [[nodiscard]] static CQScheme radau(int stages, double step, int steps) {
        CQScheme s;
        s.family_ = CQFamily::RadauIIA;
        s.tableau_ = radau_iia(stages);
        s.init_grid(step, steps);
        return s;
    }

    // Scheme names as used in configuration files: "bdf:q" or "radau:s".
    [[nodiscard]] static CQScheme parse(const std::string& name, double step, int steps) {
        const auto colon = name.find(':');
        if (colon != std::string::npos) {
            const std::string head = name.substr(0, colon);
            const std::string tail = name.substr(colon + 1);
            try {
                if (head == "bdf") return bdf(std::stoi(tail), step, steps);
                if (head == "radau") return radau(std::stoi(tail), step, steps);
            } catch (const std::invalid_argument&) {
            } catch (const std::out_of_range&) {
            }
        }
        throw ConfigError("scheme: expected \"bdf:q\" (q in 1..6) or \"radau:s\" (s in 2..3), got \"" +
                          name + "\"");
    }

    [[nodiscard]] CQFamily family() const { return family_; }
    [[nodiscard]] bool multistage() const { return family_ == CQFamily::RadauIIA; }
    [[nodiscard]] double step_size() const { return k_; }
    [[nodiscard]] int num_steps() const { return n_; }
    [[nodiscard]] double final_time() const { return k_ * n_; }
    [[nodiscard]] int stages() const { return multistage() ? tableau_.stages : 1; }

    [[nodiscard]] int bdf_order() const {
        if (multistage()) throw std::logic_error("CQScheme: not a BDF scheme");
        return bdf_order_;
    }

    [[nodiscard]] const RungeKuttaTableau& tableau() const {
        if (!multistage()) throw std::logic_error("CQScheme: not a Runge-Kutta scheme");
        return tableau_;
    }

    [[nodiscard]] int classical_order() const {
        return multistage() ? tableau_.classical_order : bdf_order_;
    }

    [[nodiscard]] int stage_order() const {
        return multistage() ? tableau_.stage_order : bdf_order_;
    }

    [[nodiscard]] std::string name() const {
        return multistage() ? "radau:" + std::to_string(tableau_.stages)
                            : "bdf:" + std::to_string(bdf_order_);
    }

    [[nodiscard]] int history_length() const { return multistage() ? n_ : n_ + 1; }

    // Time of sample node j of history entry n (stage index ignored for BDF).
    [[nodiscard]] double node_time(int entry, int stage = 0) const {
        if (multistage()) return k_ * entry + tableau_.c(stage) * k_;
        return k_ * entry;
    }

    // delta(zeta) as a matrix (1x1 for BDF).
    [[nodiscard]] Eigen::MatrixXcd delta(const Complex& zeta) const {
        if (multistage()) return rk_delta(tableau_, zeta);
        Eigen::MatrixXcd d(1, 1);
        d(0, 0) = bdf_delta(bdf_order_, zeta);
        return d;
    }

  private:
    CQScheme() = default;

    void init_grid(double step, int steps) {
        if (!(step > 0.0)) throw std::invalid_argument("CQScheme: step size must be positive");
        if (steps < 1) throw std::invalid_argument("CQScheme: step count must be >= 1");
        k_ = step;
        n_ = steps;
    }

    CQFamily family_ = CQFamily::BDF;
    int bdf_order_ = 1;
    RungeKuttaTableau tableau_;
    double k_ = 1.0;
    int n_ = 1;
};

struct ContourParameters {
    int n_zeta = 0;      // number of transform points, >= history length
    double radius = 0.0; // contour radius in (0, 1)

    // Default rule: N_zeta = 2 (N + 1) rounded up to a power of two and
    // R = eps^{1 / (2 N_zeta)}, so R^{N_zeta} = sqrt(eps) balances the
    // aliasing tail against roundoff amplification R^{-N}.
    [[nodiscard]] static ContourParameters standard(const CQScheme& scheme,
                                                    int override_points = 0) {
        int target = override_points > 0 ? override_points : 2 * (scheme.num_steps() + 1);
        if (target < scheme.history_length())
            throw ConfigError("contour-points: need at least " +
                              std::to_string(scheme.history_length()) + " transform points, got " +
                              std::to_string(target));
        int nz = 1;
        while (nz < target) nz *= 2;
        if (override_points > 0) nz = target;  // explicit override is taken literally
        ContourParameters c;
        c.n_zeta = nz;
        c.radius = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (2.0 * nz));
        return c;
    }

    [[nodiscard]] Complex zeta(int l) const {
        const double angle = -2.0 * M_PI * l / n_zeta;
        return radius * Complex(std::cos(angle), std::sin(angle));
    }

    void validate() const {
        if (n_zeta < 1) throw ConfigError("contour: n_zeta must be >= 1");
        if (!(radius > 0.0) || !(radius < 1.0))
            throw ConfigError("contour: radius must lie in (0, 1)");
    }
};

struct CQFrequency {
    Complex zeta;
    Eigen::MatrixXcd symbol;  // delta(zeta)/k; 1x1 for BDF
};

// Contour nodes with their frequency symbols.  Admissibility: every BDF
// frequency must avoid the closed negative real axis (Re sqrt(s) > 0);
// every Runge-Kutta symbol must have spectrum in the open right half-plane.
[[nodiscard]] inline std::vector<CQFrequency> cq_frequencies(const CQScheme& scheme,
                                                             const ContourParameters& contour) {
    contour.validate();
    std::vector<CQFrequency> out(contour.n_zeta);
    for (int l = 0; l < contour.n_zeta; ++l) {
        out[l].zeta = contour.zeta(l);
        out[l].symbol = scheme.delta(out[l].zeta) / scheme.step_size();
        if (!scheme.multistage()) {
            const Complex s = out[l].symbol(0, 0);
            if (s.imag() == 0.0 && s.real() <= 0.0)
                throw ContourError("cq_frequencies: BDF symbol on the negative real axis at l=" +
                                   std::to_string(l) + "; shrink the contour radius");
        } else {
            const Eigen::VectorXcd ev =
                Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(out[l].symbol, false).eigenvalues();
            for (int i = 0; i < ev.size(); ++i)
                if (!(ev(i).real() > 0.0))
                    throw ContourError(
                        "cq_frequencies: RK symbol eigenvalue outside the right half-plane at l=" +
                        std::to_string(l) + "; shrink the contour radius");
        }
    }
    return out;
}

namespace detail {

// Eigendecomposition of the matrix symbol delta(zeta)/k: the scalar
// frequencies are the eigenvalues; stage mixing happens through e / einv.
// For BDF everything is trivially 1x1.
struct SpectralSymbol {
    Eigen::VectorXcd lambda;
    Eigen::MatrixXcd e;
    Eigen::MatrixXcd einv;
};

[[nodiscard]] inline SpectralSymbol diagonalize_symbol(const CQScheme& scheme,
                                                       const Complex& zeta) {
    SpectralSymbol out;
    if (!scheme.multistage()) {
        out.lambda.resize(1);
        out.lambda(0) = bdf_delta(scheme.bdf_order(), zeta) / scheme.step_size();
        out.e = Eigen::MatrixXcd::Identity(1, 1);
        out.einv = out.e;
        return out;
    }
    // Radau symbols are generically diagonalizable; if the eigenvector basis
    // is nearly defective, nudge zeta radially inward once and retry.
    Complex z = zeta;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const Eigen::MatrixXcd sym = rk_delta(scheme.tableau(), z) / scheme.step_size();
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(sym, true);
        if (eig.info() == Eigen::Success) {
            const Eigen::MatrixXcd e = eig.eigenvectors();
            const Eigen::FullPivLU<Eigen::MatrixXcd> lu(e);
            if (lu.isInvertible()) {
                const Eigen::MatrixXcd einv = lu.inverse();
                const double cond = e.norm() * einv.norm();
                if (cond <= 1e8) {
                    out.lambda = eig.eigenvalues();
                    out.e = e;
                    out.einv = einv;
                    return out;
                }
            }
        }
        z *= (1.0 - 1e-8);
    }
    throw ContourError("diagonalize_symbol: defective RK symbol after retry");
}

// Scaled zeta-transform of a causal real vector history:
//   G_l = sum_n g_n R^n exp(-2 pi i l n / N_zeta).
[[nodiscard]] inline std::vector<Eigen::VectorXcd> scaled_dft(
    const std::vector<Eigen::VectorXd>& g, const ContourParameters& contour) {
    const int nz = contour.n_zeta;
    const int dim = g.empty() ? 0 : static_cast<int>(g[0].size());
    std::vector<Eigen::VectorXcd> out(nz, Eigen::VectorXcd::Zero(dim));
    Eigen::FFT<double> fft;
    std::vector<Complex> in(nz), spec(nz);
    for (int i = 0; i < dim; ++i) {
        double scale = 1.0;
        for (int n = 0; n < nz; ++n) {
            in[n] = n < static_cast<int>(g.size()) ? Complex(g[n](i) * scale, 0.0) : Complex(0.0);
            scale *= contour.radius;
        }
        fft.fwd(spec, in);
        for (int l = 0; l < nz; ++l) out[l](i) = spec[l];
    }
    return out;
}

// Inverse transform: u_n = R^{-n} (1/N_zeta) sum_l W_l exp(+2 pi i l n / N_zeta),
// truncated to out_length entries; the imaginary parts (contour roundoff)
// are discarded.
[[nodiscard]] inline std::vector<Eigen::VectorXd> inverse_scaled_dft(
    const std::vector<Eigen::VectorXcd>& w, const ContourParameters& contour, int out_length) {
    const int nz = contour.n_zeta;
    const int dim = w.empty() ? 0 : static_cast<int>(w[0].size());
    std::vector<Eigen::VectorXd> out(out_length, Eigen::VectorXd::Zero(dim));
    Eigen::FFT<double> fft;
    std::vector<Complex> spec(nz), time(nz);
    for (int i = 0; i < dim; ++i) {
        for (int l = 0; l < nz; ++l) spec[l] = w[l](i);
        fft.inv(time, spec);
        double unscale = 1.0;
        for (int n = 0; n < out_length; ++n) {
            out[n](i) = time[n].real() * unscale;
            unscale /= contour.radius;
        }
    }
    return out;
}

// Drives the half-contour loop: action(l, spectral) must return the
// frequency-domain output at node l; the conjugate half is mirrored.
// Requires the underlying operator family to be real in the time domain.
inline std::vector<Eigen::VectorXcd> map_contour(
    const CQScheme& scheme, const ContourParameters& contour, int workers, int out_dim,
    const std::function<Eigen::VectorXcd(int, const SpectralSymbol&)>& action) {
    const int nz = contour.n_zeta;
    const int half = nz / 2;
    std::vector<Eigen::VectorXcd> out(nz, Eigen::VectorXcd::Zero(out_dim));
    parallel_for(half + 1, workers, [&](int l) {
        const SpectralSymbol spectral = diagonalize_symbol(scheme, contour.zeta(l));
        out[l] = action(l, spectral);
    });
    for (int l = half + 1; l < nz; ++l) out[l] = out[nz - l].conjugate();
    return out;
}

// Apply (einv x I) or (e x I) to a stage-stacked vector.
[[nodiscard]] inline Eigen::VectorXcd stage_transform(const Eigen::MatrixXcd& m,
                                                      const Eigen::VectorXcd& v) {
    const int s = static_cast<int>(m.rows());
    const int d = static_cast<int>(v.size()) / s;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) out.segment(i * d, d) += m(i, j) * v.segment(j * d, d);
    return out;
}

}  // namespace detail

// Discrete causal convolution (sum_{m <= n} omega_{n-m}^F g_m)_n for an
// operator family given by its action at a scalar frequency,
// apply(s, v) = F(s) v.  Histories are stage-stacked per entry (entry dim =
// stages * d); the family must satisfy F(conj(s)) = conj(F(s)).
inline std::vector<Eigen::VectorXd> forward_convolution(
    const std::function<Eigen::VectorXcd(const Complex&, const Eigen::VectorXcd&)>& apply,
    const std::vector<Eigen::VectorXd>& g, const CQScheme& scheme,
    const ContourParameters& contour, int workers = 1) {
    contour.validate();
    const int length = static_cast<int>(g.size());
    if (length != scheme.history_length())
        throw std::invalid_argument("forward_convolution: history length mismatch");
    if (contour.n_zeta < length)
        throw ConfigError("forward_convolution: contour has fewer points than the history");
    const int dim = static_cast<int>(g[0].size());
    if (dim % scheme.stages() != 0)
        throw std::invalid_argument("forward_convolution: entry dim not divisible by stages");

    const auto ghat = detail::scaled_dft(g, contour);
    const auto what = detail::map_contour(
        scheme, contour, workers, dim,
        [&](int l, const detail::SpectralSymbol& spectral) {
            const Eigen::VectorXcd mixed = detail::stage_transform(spectral.einv, ghat[l]);
            const int d = dim / scheme.stages();
            Eigen::VectorXcd result(dim);
            for (int i = 0; i < scheme.stages(); ++i)
                result.segment(i * d, d) = apply(spectral.lambda(i), mixed.segment(i * d, d));
            return detail::stage_transform(spectral.e, result).eval();
        });
    return detail::inverse_scaled_dft(what, contour, length);
}

// CQ weights W_0..W_count of the operator family f applied to the matrix
// symbol: F(delta(zeta)/k) = sum_n W_n zeta^n.  W_n is 1x1 for BDF, s x s
// for Runge-Kutta schemes.
inline std::vector<Eigen::MatrixXcd> cq_weights(const std::function<Complex(Complex)>& f,
                                                const CQScheme& scheme,
                                                const ContourParameters& contour, int count) {
    contour.validate();
    const int nz = contour.n_zeta;
    if (count >= nz) throw ConfigError("cq_weights: need more contour points than weights");
    const int s = scheme.stages();
    std::vector<Eigen::MatrixXcd> symbol_values(nz);
    for (int l = 0; l <= nz / 2; ++l) {
        const detail::SpectralSymbol spectral =
            detail::diagonalize_symbol(scheme, contour.zeta(l));
        Eigen::VectorXcd flam(s);
        for (int i = 0; i < s; ++i) flam(i) = f(spectral.lambda(i));
        symbol_values[l] = spectral.e * flam.asDiagonal() * spectral.einv;
        if (l > 0 && l < nz - l) symbol_values[nz - l] = symbol_values[l].conjugate();
    }
    std::vector<Eigen::MatrixXcd> weights(count + 1, Eigen::MatrixXcd::Zero(s, s));
    for (int n = 0; n <= count; ++n) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(s, s);
        for (int l = 0; l < nz; ++l) {
            const double angle = 2.0 * M_PI * l * n / nz;
            acc += symbol_values[l] * Complex(std::cos(angle), std::sin(angle));
        }
        weights[n] = acc / (static_cast<double>(nz) * std::pow(contour.radius, n));
    }
    return weights;
}

// Boundary-data samples feeding the right-hand side of the block system:
// per history entry (stage-stacked), the exact-data Galerkin loads and the
// L2 projection coefficients.
struct RhsSampleHistory {
    std::vector<Eigen::VectorXd> load_x_b0;  // <mu_i, b0>
    std::vector<Eigen::VectorXd> load_y_b1;  // <b1, phi_i>
    std::vector<Eigen::VectorXd> proj_x_b1;  // Pi_X b1 coefficients
    std::vector<Eigen::VectorXd> proj_y_b0;  // Pi_Y b0 coefficients
};

// All-at-once solve of the convolution system A(partial_t^k) u = B(partial_t^k) data:
// scale + DFT the data histories, per contour node build and solve the
// frequency system at each eigenvalue of the symbol, recombine stages,
// inverse DFT + unscale.  make_system(s) must return an object exposing
//   rhs(load_x, load_y, proj_x, proj_y) -> VectorXcd and
//   solve(VectorXcd) -> VectorXcd (dimension nx + ny),
// and must be safe to call concurrently.  Returns the stage-stacked history
// of [lambda; phi] coefficient vectors.
template <typename MakeSystem>
[[nodiscard]] std::vector<Eigen::VectorXd> solve_convolution_system(
    MakeSystem&& make_system, const RhsSampleHistory& data, const CQScheme& scheme,
    const ContourParameters& contour, int workers = 1) {
    contour.validate();
    const int length = scheme.history_length();
    if (static_cast<int>(data.load_x_b0.size()) != length ||
        static_cast<int>(data.load_y_b1.size()) != length ||
        static_cast<int>(data.proj_x_b1.size()) != length ||
        static_cast<int>(data.proj_y_b0.size()) != length)
        throw std::invalid_argument("solve_convolution_system: data history length mismatch");
    if (contour.n_zeta < length)
        throw ConfigError("solve_convolution_system: contour has fewer points than the history");
    const int stages = scheme.stages();
    const int snx = static_cast<int>(data.load_x_b0[0].size());
    const int sny = static_cast<int>(data.load_y_b1[0].size());
    if (snx % stages != 0 || sny % stages != 0)
        throw std::invalid_argument("solve_convolution_system: entry dim not divisible by stages");
    const int nx = snx / stages;
    const int ny = sny / stages;

    const auto hat_lx = detail::scaled_dft(data.load_x_b0, contour);
    const auto hat_ly = detail::scaled_dft(data.load_y_b1, contour);
    const auto hat_px = detail::scaled_dft(data.proj_x_b1, contour);
    const auto hat_py = detail::scaled_dft(data.proj_y_b0, contour);

    const auto what = detail::map_contour(
        scheme, contour, workers, stages * (nx + ny),
        [&](int l, const detail::SpectralSymbol& spectral) {
            const Eigen::VectorXcd lx = detail::stage_transform(spectral.einv, hat_lx[l]);
            const Eigen::VectorXcd ly = detail::stage_transform(spectral.einv, hat_ly[l]);
            const Eigen::VectorXcd px = detail::stage_transform(spectral.einv, hat_px[l]);
            const Eigen::VectorXcd py = detail::stage_transform(spectral.einv, hat_py[l]);
            Eigen::VectorXcd sol(stages * (nx + ny));
            for (int i = 0; i < stages; ++i) {
                const auto system = make_system(spectral.lambda(i));
                const Eigen::VectorXcd rhs =
                    system.rhs(lx.segment(i * nx, nx), ly.segment(i * ny, ny),
                               px.segment(i * nx, nx), py.segment(i * ny, ny));
                sol.segment(i * (nx + ny), nx + ny) = system.solve(rhs);
            }
            return detail::stage_transform(spectral.e, sol).eval();
        });
    return detail::inverse_scaled_dft(what, contour, length);
}

// Scalar convenience wrapper used by the symbol self-tests: samples g at the
// scheme's nodes, convolves with the scalar family f, and returns the step
// values u(t_j), j = 0..N (Runge-Kutta step values are the final stages).
inline std::vector<double> scalar_convolution(const std::function<Complex(Complex)>& f,
                                              const std::function<double(double)>& g,
                                              const CQScheme& scheme,
                                              const ContourParameters& contour) {
    const int stages = scheme.stages();
    std::vector<Eigen::VectorXd> history(scheme.history_length(), Eigen::VectorXd::Zero(stages));
    for (int n = 0; n < scheme.history_length(); ++n)
        for (int i = 0; i < stages; ++i) history[n](i) = g(scheme.node_time(n, i));
    const auto apply = [&f](const Complex& s, const Eigen::VectorXcd& v) {
        return (f(s) * v).eval();
    };
    const auto out = forward_convolution(apply, history, scheme, contour);
    std::vector<double> steps(scheme.num_steps() + 1, 0.0);
    if (scheme.multistage()) {
        for (int n = 1; n <= scheme.num_steps(); ++n) steps[n] = out[n - 1](stages - 1);
    } else {
        for (int n = 0; n <= scheme.num_steps(); ++n) steps[n] = out[n](0);
    }
    return steps;
}

}  // namespace heatcq
