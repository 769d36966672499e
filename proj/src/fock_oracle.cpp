#include "dualsu11/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace dualsu11 {
namespace {

constexpr std::size_t kAmplitudeBudget = std::size_t{1} << 26;
constexpr double kNormDriftLimit = 1e-9;
constexpr double kLeakageLimit = 1e-8;

std::size_t checked_size(int n_modes, int cutoff) {
    const auto dim = static_cast<std::size_t>(cutoff) + 1;
    std::size_t total = 1;
    for (int k = 0; k < n_modes; ++k) {
        if (total > kAmplitudeBudget / dim)
            throw std::length_error("fock space with " + std::to_string(n_modes) +
                                    " modes at cutoff " + std::to_string(cutoff) +
                                    " exceeds the 2^26 amplitude budget; use a smaller cutoff");
        total *= dim;
    }
    return total;
}

std::size_t stride_of(const FockState& s, int mode) {
    const auto dim = static_cast<std::size_t>(s.cutoff) + 1;
    std::size_t st = 1;
    for (int k = 0; k < mode; ++k) st *= dim;
    return st;
}

void check_mode(const FockState& s, int mode, const char* op) {
    if (mode < 0 || mode >= s.n_modes)
        throw std::invalid_argument(std::string(op) + ": mode index out of range");
}

// One pass over the tensor after a gate: tracks the norm and the mass
// sitting within two levels of the cutoff, and clears the converged flag
// when either drifts past its limit.
void finalize_gate(FockState& s) {
    const int dim = s.cutoff + 1;
    const int edge = s.cutoff - 1;
    std::vector<int> digits(s.n_modes, 0);
    int hot = 0;  // digits currently >= edge
    double norm = 0.0;
    double leak = 0.0;
    const std::size_t total = s.amplitudes.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        const double p = std::norm(s.amplitudes[idx]);
        norm += p;
        if (hot > 0) leak += p;
        for (int k = 0; k < s.n_modes; ++k) {
            const int before = digits[k];
            if (before + 1 < dim) {
                digits[k] = before + 1;
                if (before + 1 == edge) ++hot;
                break;
            }
            digits[k] = 0;
            if (before >= edge) --hot;
        }
    }
    const double drift = std::abs(norm - 1.0);
    s.max_norm_drift = std::max(s.max_norm_drift, drift);
    s.max_leakage = std::max(s.max_leakage, leak);
    if (drift > kNormDriftLimit || leak > kLeakageLimit) s.converged = false;
}

void apply_one_mode(FockState& s, int mode, const Eigen::MatrixXcd& W) {
    const auto dim = static_cast<std::size_t>(s.cutoff) + 1;
    const std::size_t sp = stride_of(s, mode);
    const std::size_t block = sp * dim;
    Eigen::VectorXcd x(dim), y(dim);
    for (std::size_t base = 0; base < s.amplitudes.size(); base += block) {
        for (std::size_t inner = 0; inner < sp; ++inner) {
            Complex* a = s.amplitudes.data() + base + inner;
            for (std::size_t n = 0; n < dim; ++n) x(n) = a[n * sp];
            y.noalias() = W * x;
            for (std::size_t n = 0; n < dim; ++n) a[n * sp] = y(n);
        }
    }
}

// A block of basis states closed under one two-mode gate, with the unitary
// restricted to it and the element addresses relative to a base index over
// the remaining modes.
struct Sector {
    Eigen::MatrixXcd W;
    std::vector<std::size_t> offsets;
};

void apply_two_mode_sectors(FockState& s, int mode_p, int mode_q,
                            const std::vector<Sector>& sectors) {
    const auto dim = static_cast<std::size_t>(s.cutoff) + 1;
    std::vector<std::size_t> rest{0};
    rest.reserve(s.amplitudes.size() / (dim * dim));
    for (int k = 0; k < s.n_modes; ++k) {
        if (k == mode_p || k == mode_q) continue;
        const std::size_t sk = stride_of(s, k);
        const std::size_t count = rest.size();
        for (std::size_t n = 1; n < dim; ++n)
            for (std::size_t i = 0; i < count; ++i) rest.push_back(rest[i] + n * sk);
    }

    Eigen::VectorXcd x(dim), y(dim);
    Complex* amp = s.amplitudes.data();
    for (const std::size_t base : rest) {
        for (const Sector& sec : sectors) {
            const auto L = static_cast<Eigen::Index>(sec.offsets.size());
            for (Eigen::Index i = 0; i < L; ++i) x(i) = amp[base + sec.offsets[i]];
            y.head(L).noalias() = sec.W * x.head(L);
            for (Eigen::Index i = 0; i < L; ++i) amp[base + sec.offsets[i]] = y(i);
        }
    }
}

Complex ipow(Complex z, int e) {
    Complex r = 1.0;
    for (int k = 0; k < e; ++k) r *= z;
    return r;
}

// Sectors of a two-mode passive rotation H (2x2, column convention), exact
// per total photon number n: the amplitude map between |k, n-k> states is
// the expansion of (H00 a_p^dag + H10 a_q^dag)^k (H01 a_p^dag + H11 a_q^dag)^(n-k)
// on vacuum.  Sectors with n > cutoff are clipped to the reachable window;
// the clipped mass shows up as norm drift.
std::vector<Sector> passive_pair_sectors(const FockState& s, int mode_p, int mode_q,
                                         const Matrix2c& H) {
    const int c = s.cutoff;
    const std::size_t sp = stride_of(s, mode_p);
    const std::size_t sq = stride_of(s, mode_q);

    std::vector<double> fact(2 * c + 1);
    fact[0] = 1.0;
    for (int n = 1; n <= 2 * c; ++n) fact[n] = fact[n - 1] * n;
    auto binom = [&fact](int n, int k) { return fact[n] / (fact[k] * fact[n - k]); };

    std::vector<Complex> pa(2 * c + 1), pb(2 * c + 1), pc(2 * c + 1), pd(2 * c + 1);
    for (int e = 0; e <= 2 * c; ++e) {
        pa[e] = ipow(H(0, 0), e);
        pc[e] = ipow(H(1, 0), e);
        pb[e] = ipow(H(0, 1), e);
        pd[e] = ipow(H(1, 1), e);
    }

    std::vector<Sector> sectors;
    sectors.reserve(2 * c + 1);
    for (int n = 0; n <= 2 * c; ++n) {
        const int lo = std::max(0, n - c);
        const int hi = std::min(n, c);
        const int L = hi - lo + 1;
        Sector sec;
        sec.W.resize(L, L);
        sec.offsets.resize(L);
        for (int a = 0; a < L; ++a) {
            const int k = lo + a;
            sec.offsets[a] = static_cast<std::size_t>(k) * sp +
                             static_cast<std::size_t>(n - k) * sq;
            for (int b = 0; b < L; ++b) {
                const int m = lo + b;
                Complex sum = 0.0;
                const int jlo = std::max(0, k - (n - m));
                const int jhi = std::min(m, k);
                for (int j = jlo; j <= jhi; ++j)
                    sum += binom(m, j) * binom(n - m, k - j) * pa[j] * pc[m - j] *
                           pb[k - j] * pd[(n - m) - (k - j)];
                sec.W(a, b) =
                    std::sqrt(fact[k] * fact[n - k] / (fact[m] * fact[n - m])) * sum;
            }
        }
        sectors.push_back(std::move(sec));
    }
    return sectors;
}

void apply_diagonal_phases(FockState& s, const Vector4c& lambda) {
    const auto dim = static_cast<std::size_t>(s.cutoff) + 1;
    std::vector<Complex> pows[4];
    for (int k = 0; k < 4; ++k) {
        pows[k].resize(dim);
        pows[k][0] = 1.0;
        for (std::size_t n = 1; n < dim; ++n) pows[k][n] = pows[k][n - 1] * lambda(k);
    }
    const std::size_t dim4 = dim * dim * dim * dim;
    std::vector<Complex> table(dim4);
    std::size_t idx = 0;
    for (std::size_t n3 = 0; n3 < dim; ++n3)
        for (std::size_t n2 = 0; n2 < dim; ++n2)
            for (std::size_t n1 = 0; n1 < dim; ++n1) {
                const Complex outer = pows[3][n3] * pows[2][n2] * pows[1][n1];
                for (std::size_t n0 = 0; n0 < dim; ++n0) table[idx++] = outer * pows[0][n0];
            }
    Complex* amp = s.amplitudes.data();
    for (std::size_t base = 0; base < s.amplitudes.size(); base += dim4)
        for (std::size_t i = 0; i < dim4; ++i) amp[base + i] *= table[i];
}

}  // namespace

FockState fock_vacuum(int n_modes, int cutoff) {
    if (n_modes < 1) throw std::invalid_argument("fock_vacuum: need at least one mode");
    if (cutoff < 2) throw std::invalid_argument("fock_vacuum: cutoff must be at least 2");
    const std::size_t total = checked_size(n_modes, cutoff);
    FockState s;
    s.n_modes = n_modes;
    s.cutoff = cutoff;
    s.amplitudes.assign(total, Complex(0.0));
    s.amplitudes[0] = 1.0;
    return s;
}

double fock_norm(const FockState& s) {
    double norm = 0.0;
    for (const Complex& a : s.amplitudes) norm += std::norm(a);
    return norm;
}

FockState apply_displacement_fock(const FockState& s, int mode, Complex amplitude) {
    check_mode(s, mode, "apply_displacement_fock");
    if (amplitude == Complex(0.0)) return s;
    const int dim = s.cutoff + 1;
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        const double root = std::sqrt(double(n) + 1.0);
        T(n + 1, n) = amplitude * root;
        T(n, n + 1) = -std::conj(amplitude) * root;
    }
    FockState out = s;
    apply_one_mode(out, mode, T.exp());
    finalize_gate(out);
    return out;
}

FockState apply_two_mode_squeezer(const FockState& s, int mode_p, int mode_q,
                                  double gain_g, int sign) {
    check_mode(s, mode_p, "apply_two_mode_squeezer");
    check_mode(s, mode_q, "apply_two_mode_squeezer");
    if (mode_p == mode_q)
        throw std::invalid_argument("apply_two_mode_squeezer: modes must differ");
    if (!std::isfinite(gain_g) || gain_g < 0.0)
        throw std::invalid_argument("apply_two_mode_squeezer: gain_g must be finite and non-negative");
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("apply_two_mode_squeezer: sign must be +1 or -1");
    if (gain_g == 0.0) return s;

    const int c = s.cutoff;
    const double xi = sign * gain_g;
    const std::size_t sp = stride_of(s, mode_p);
    const std::size_t sq = stride_of(s, mode_q);

    std::vector<Sector> sectors;
    sectors.reserve(2 * c + 1);
    for (int k = -c; k <= c; ++k) {
        const int L = c - std::abs(k) + 1;
        const int bp = std::max(k, 0);
        const int bq = std::max(-k, 0);
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(L, L);
        for (int m = 0; m + 1 < L; ++m) {
            const double v = xi * std::sqrt(double(bp + m + 1) * double(bq + m + 1));
            G(m + 1, m) = v;
            G(m, m + 1) = -v;
        }
        Sector sec;
        const Eigen::MatrixXd W = G.exp();
        sec.W = W.cast<Complex>();
        sec.offsets.resize(L);
        for (int m = 0; m < L; ++m)
            sec.offsets[m] = static_cast<std::size_t>(bp + m) * sp +
                             static_cast<std::size_t>(bq + m) * sq;
        sectors.push_back(std::move(sec));
    }

    FockState out = s;
    apply_two_mode_sectors(out, mode_p, mode_q, sectors);
    finalize_gate(out);
    return out;
}

FockState apply_passive_fock(const FockState& s, const Matrix4c& J) {
    if (s.n_modes < kPhysicalModes)
        throw std::invalid_argument("apply_passive_fock: state has fewer than 4 modes");
    const Matrix4c res = J * J.adjoint() - Matrix4c::Identity();
    if (res.cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("apply_passive_fock: J must be unitary");

    // Triangularize J with rotations on adjacent row pairs; J then factors as
    // G_1^dag ... G_K^dag D, applied to the state as D first, G_K^dag ... G_1^dag after.
    struct Step {
        int top;
        Matrix2c G;
    };
    Matrix4c M = J;
    std::vector<Step> steps;
    for (int col = 0; col < 3; ++col) {
        for (int row = 3; row > col; --row) {
            const Complex alpha = M(row - 1, col);
            const Complex beta = M(row, col);
            if (std::abs(beta) < 1e-15) continue;
            const double rho = std::sqrt(std::norm(alpha) + std::norm(beta));
            Matrix2c G;
            G << std::conj(alpha) / rho, std::conj(beta) / rho,
                 -beta / rho,            alpha / rho;
            M.block<2, 4>(row - 1, 0) = (G * M.block<2, 4>(row - 1, 0)).eval();
            steps.push_back({row - 1, G});
        }
    }

    FockState out = s;
    apply_diagonal_phases(out, M.diagonal());
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        const Matrix2c H = it->G.adjoint();
        apply_two_mode_sectors(out, it->top, it->top + 1,
                               passive_pair_sectors(out, it->top, it->top + 1, H));
        finalize_gate(out);
    }
    return out;
}

FockState apply_loss_fock(const FockState& s, int mode, double transmission_t) {
    check_mode(s, mode, "apply_loss_fock");
    if (!(transmission_t >= 0.0 && transmission_t <= 1.0))
        throw std::invalid_argument("apply_loss_fock: transmission must lie in [0, 1]");

    const std::size_t new_total = checked_size(s.n_modes + 1, s.cutoff);
    FockState out;
    out.n_modes = s.n_modes + 1;
    out.cutoff = s.cutoff;
    out.converged = s.converged;
    out.max_leakage = s.max_leakage;
    out.max_norm_drift = s.max_norm_drift;
    out.amplitudes.assign(new_total, Complex(0.0));
    std::copy(s.amplitudes.begin(), s.amplitudes.end(), out.amplitudes.begin());

    const int anc = s.n_modes;
    const double r = std::sqrt(1.0 - transmission_t * transmission_t);
    Matrix2c H;
    H << transmission_t, r,
         -r,             transmission_t;
    apply_two_mode_sectors(out, mode, anc, passive_pair_sectors(out, mode, anc, H));
    finalize_gate(out);
    return out;
}

PhotonStatistics fock_photon_statistics(const FockState& s,
                                        const std::vector<ModeIndex>& subset) {
    if (s.n_modes < kPhysicalModes)
        throw std::invalid_argument("fock_photon_statistics: state has fewer than 4 modes");
    bool selected[kPhysicalModes] = {false, false, false, false};
    for (ModeIndex m : subset) selected[flat_index(m)] = true;
    std::vector<bool> in_subset(s.n_modes, false);
    bool any = false;
    for (int k = 0; k < kPhysicalModes; ++k) {
        in_subset[k] = selected[k];
        any = any || selected[k];
    }
    if (!any) throw std::invalid_argument("fock_photon_statistics: empty detection subset");

    const int dim = s.cutoff + 1;
    std::vector<int> digits(s.n_modes, 0);
    long total_n = 0;
    double mean = 0.0;
    double second = 0.0;
    const std::size_t total = s.amplitudes.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        const double p = std::norm(s.amplitudes[idx]);
        mean += p * double(total_n);
        second += p * double(total_n) * double(total_n);
        for (int k = 0; k < s.n_modes; ++k) {
            if (digits[k] + 1 < dim) {
                digits[k] += 1;
                if (in_subset[k]) total_n += 1;
                break;
            }
            if (in_subset[k]) total_n -= digits[k];
            digits[k] = 0;
        }
    }
    return {mean, second - mean * mean};
}

FockState run_pipeline_fock(const InterferometerConfig& cfg, int cutoff) {
    const PipelineProgram program = compile_pipeline(cfg);
    FockState s = fock_vacuum(kPhysicalModes, cutoff);
    for (const PipelineOp& op : program.ops) {
        std::visit(
            [&s](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, SeedOp>) {
                    s = apply_displacement_fock(s, flat_index(o.mode), o.amplitude);
                } else if constexpr (std::is_same_v<T, OpaOp>) {
                    const int sig = flat_index(ModeIndex{Frequency::Signal, o.params.polarization});
                    const int idl = flat_index(ModeIndex{Frequency::Idler, o.params.polarization});
                    s = apply_two_mode_squeezer(s, sig, idl, o.params.gain_g, o.params.sign);
                } else if constexpr (std::is_same_v<T, PassiveOp>) {
                    s = apply_passive_fock(s, o.matrix);
                } else {
                    s = apply_loss_fock(s, flat_index(o.mode), o.transmission);
                }
            },
            op);
    }
    return s;
}

}  // namespace dualsu11
