#include "catwit/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace catwit {

long ModeShape::dim() const {
    long d = 1;
    for (int m : dims) {
        if (m < 2) throw ShapeMismatch("mode dimension must be >= 2");
        d *= m;
    }
    return d;
}

std::vector<long> ModeShape::strides() const {
    std::vector<long> s(dims.size());
    long acc = 1;
    for (int i = n_modes() - 1; i >= 0; --i) {
        s[i] = acc;
        acc *= dims[i];
    }
    return s;
}

cplx overlap(const Ket& a, const Ket& b) {
    if (!(a.shape == b.shape)) throw ShapeMismatch("overlap: shapes differ");
    return a.amps.dot(b.amps); // Eigen dot conjugates the left argument
}

Operator outer(const Ket& a, const Ket& b) {
    if (!(a.shape == b.shape)) throw ShapeMismatch("outer: shapes differ");
    return Operator{a.amps * b.amps.adjoint(), a.shape};
}

DensityCheck check_density(const Operator& rho, double herm_tol, double trace_tol,
                           double eig_tol) {
    DensityCheck r;
    r.hermiticity_residual = (rho.mat - rho.mat.adjoint()).cwiseAbs().maxCoeff();
    r.trace_deviation = std::abs(rho.mat.trace() - cplx(1.0, 0.0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho.mat + rho.mat.adjoint()),
                                             Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    r.pass = r.hermiticity_residual <= herm_tol && r.trace_deviation <= trace_tol &&
             r.min_eigenvalue >= -eig_tol;
    return r;
}

void assert_density(const Operator& rho, double herm_tol, double trace_tol,
                    double eig_tol) {
    DensityCheck r = check_density(rho, herm_tol, trace_tol, eig_tol);
    if (!r.pass) {
        throw NotPositive("density check failed: herm=" + std::to_string(r.hermiticity_residual) +
                          " trace_dev=" + std::to_string(r.trace_deviation) +
                          " min_eig=" + std::to_string(r.min_eigenvalue));
    }
}

int coherent_cutoff(double alpha, double tol) {
    const double lambda = alpha * alpha;
    double term = std::exp(-lambda); // Poisson p_0
    double cum = term;
    int n = 0;
    while (1.0 - cum >= tol && n < 4096) {
        ++n;
        term *= lambda / n;
        cum += term;
    }
    return n;
}

Ket coherent_ket(double alpha, int cutoff, double tol) {
    if (cutoff < 1) throw DomainError("coherent_ket: cutoff must be >= 1");
    Vector amps(cutoff + 1);
    // c_n = exp(-a^2/2) a^n / sqrt(n!)
    double c = std::exp(-alpha * alpha / 2.0);
    double sq_sum = 0;
    for (int n = 0; n <= cutoff; ++n) {
        if (n > 0) c *= alpha / std::sqrt(double(n));
        amps[n] = c;
        sq_sum += c * c;
    }
    double tail = 1.0 - sq_sum;
    if (tail >= tol) {
        throw CutoffTooSmall("coherent_ket: tail mass " + std::to_string(tail) +
                             " at cutoff " + std::to_string(cutoff));
    }
    Ket k{amps, ModeShape{cutoff + 1}};
    k.normalize();
    return k;
}

double cat_normalizer(double alpha, CatSign sign) {
    double ov = std::exp(-2.0 * alpha * alpha);
    double n2 = sign == CatSign::plus ? 2.0 * (1.0 + ov) : 2.0 * (1.0 - ov);
    return std::sqrt(n2);
}

Ket cat_ket(double alpha, CatSign sign, int cutoff, double tol) {
    if (sign == CatSign::minus && std::abs(alpha) < 1e-8) {
        throw DegenerateCat("cat_ket: odd cat undefined at alpha ~ 0");
    }
    Ket plus = coherent_ket(alpha, cutoff, tol);
    Ket minus = coherent_ket(-alpha, cutoff, tol);
    Vector amps = sign == CatSign::plus ? (plus.amps + minus.amps).eval()
                                        : (plus.amps - minus.amps).eval();
    Ket k{amps, plus.shape};
    k.normalize();
    return k;
}

LadderOps ladder_ops(int cutoff) {
    if (cutoff < 1) throw DomainError("ladder_ops: cutoff must be >= 1");
    const int d = cutoff + 1;
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
    Matrix num = Matrix::Zero(d, d);
    for (int n = 0; n <= cutoff; ++n) num(n, n) = n;
    ModeShape sh{d};
    return LadderOps{Operator{a, sh}, Operator{a.adjoint(), sh}, Operator{num, sh}};
}

Operator beamsplitter_unitary(double eta, int cutoff) {
    if (eta < 0.0 || eta > 1.0) throw DomainError("beamsplitter_unitary: eta outside [0,1]");
    const int d = cutoff + 1;
    const double theta = std::asin(std::sqrt(eta));
    Matrix u = Matrix::Zero(long(d) * d, long(d) * d);
    // Generator theta (a b^dag - a^dag b) conserves total photon number; build
    // exp per total-photon block.
    for (int m = 0; m <= 2 * cutoff; ++m) {
        const int k_min = std::max(0, m - cutoff);
        const int k_max = std::min(m, cutoff);
        const int bd = k_max - k_min + 1;
        // H = i A with A the antisymmetric generator block; H is Hermitian.
        Matrix h = Matrix::Zero(bd, bd);
        for (int k = k_min; k < k_max; ++k) {
            // <k, m-k| a b^dag |k+1, m-k-1> = sqrt(k+1) sqrt(m-k)
            double g = std::sqrt(double(k + 1)) * std::sqrt(double(m - k));
            h(k - k_min, k + 1 - k_min) = cplx(0, 1) * g;
            h(k + 1 - k_min, k - k_min) = cplx(0, -1) * g;
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        Vector phases(bd);
        for (int i = 0; i < bd; ++i) {
            phases[i] = std::exp(cplx(0, -theta * es.eigenvalues()[i]));
        }
        Matrix ub = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        for (int k1 = k_min; k1 <= k_max; ++k1) {
            for (int k2 = k_min; k2 <= k_max; ++k2) {
                long row = long(k1) * d + (m - k1);
                long col = long(k2) * d + (m - k2);
                u(row, col) = ub(k1 - k_min, k2 - k_min);
            }
        }
    }
    return Operator{std::move(u), ModeShape{d, d}};
}

Ket tensor(const Ket& a, const Ket& b) {
    Vector out(a.amps.size() * b.amps.size());
    for (long i = 0; i < a.amps.size(); ++i) {
        out.segment(i * b.amps.size(), b.amps.size()) = a.amps[i] * b.amps;
    }
    ModeShape sh = a.shape;
    sh.dims.insert(sh.dims.end(), b.shape.dims.begin(), b.shape.dims.end());
    return Ket{std::move(out), std::move(sh)};
}

Operator tensor(const Operator& a, const Operator& b) {
    const long da = a.mat.rows(), db = b.mat.rows();
    Matrix out(da * db, da * db);
    for (long i = 0; i < da; ++i) {
        for (long j = 0; j < da; ++j) {
            out.block(i * db, j * db, db, db) = a.mat(i, j) * b.mat;
        }
    }
    ModeShape sh = a.shape;
    sh.dims.insert(sh.dims.end(), b.shape.dims.begin(), b.shape.dims.end());
    return Operator{std::move(out), std::move(sh)};
}

Operator tensor(const std::vector<Operator>& ops) {
    if (ops.empty()) throw ShapeMismatch("tensor: empty list");
    Operator acc = ops[0];
    for (size_t i = 1; i < ops.size(); ++i) acc = tensor(acc, ops[i]);
    return acc;
}

namespace {

struct TraceIndexing {
    std::vector<int> keep;
    std::vector<int> traced;
    long keep_dim = 1;
    long traced_dim = 1;
    std::vector<long> keep_strides;   // strides of kept modes in the full space
    std::vector<long> traced_strides; // strides of traced modes in the full space
    std::vector<int> keep_dims;
    std::vector<int> traced_dims;
};

TraceIndexing make_trace_indexing(const ModeShape& shape, const std::vector<int>& keep) {
    TraceIndexing t;
    t.keep = keep;
    std::vector<bool> is_kept(shape.n_modes(), false);
    for (int m : keep) {
        if (m < 0 || m >= shape.n_modes()) throw ShapeMismatch("partial_trace: bad mode index");
        if (is_kept[m]) throw ShapeMismatch("partial_trace: duplicate mode index");
        is_kept[m] = true;
    }
    auto strides = shape.strides();
    for (int m = 0; m < shape.n_modes(); ++m) {
        if (is_kept[m]) continue;
        t.traced.push_back(m);
        t.traced_dim *= shape.dims[m];
        t.traced_strides.push_back(strides[m]);
        t.traced_dims.push_back(shape.dims[m]);
    }
    for (int m : keep) {
        t.keep_dim *= shape.dims[m];
        t.keep_strides.push_back(strides[m]);
        t.keep_dims.push_back(shape.dims[m]);
    }
    return t;
}

// Flat offset in the full space for the `idx`-th multi-index over the given
// dims/strides.
long unrank(long idx, const std::vector<int>& dims, const std::vector<long>& strides) {
    long off = 0;
    for (int m = int(dims.size()) - 1; m >= 0; --m) {
        off += (idx % dims[m]) * strides[m];
        idx /= dims[m];
    }
    return off;
}

} // namespace

Operator partial_trace(const Operator& rho, const std::vector<int>& keep) {
    if (rho.mat.rows() != rho.mat.cols() || rho.mat.rows() != rho.shape.dim()) {
        throw ShapeMismatch("partial_trace: matrix size inconsistent with shape");
    }
    TraceIndexing t = make_trace_indexing(rho.shape, keep);
    Matrix out = Matrix::Zero(t.keep_dim, t.keep_dim);
    std::vector<long> keep_off(t.keep_dim), traced_off(t.traced_dim);
    for (long i = 0; i < t.keep_dim; ++i) keep_off[i] = unrank(i, t.keep_dims, t.keep_strides);
    for (long r = 0; r < t.traced_dim; ++r) traced_off[r] = unrank(r, t.traced_dims, t.traced_strides);
    for (long i = 0; i < t.keep_dim; ++i) {
        for (long j = 0; j < t.keep_dim; ++j) {
            cplx acc = 0;
            for (long r = 0; r < t.traced_dim; ++r) {
                acc += rho.mat(keep_off[i] + traced_off[r], keep_off[j] + traced_off[r]);
            }
            out(i, j) = acc;
        }
    }
    ModeShape sh;
    for (int m : keep) sh.dims.push_back(rho.shape.dims[m]);
    return Operator{std::move(out), std::move(sh)};
}

Operator partial_trace_pure(const Ket& psi, const std::vector<int>& keep) {
    if (psi.amps.size() != psi.shape.dim()) {
        throw ShapeMismatch("partial_trace_pure: vector size inconsistent with shape");
    }
    TraceIndexing t = make_trace_indexing(psi.shape, keep);
    std::vector<long> keep_off(t.keep_dim), traced_off(t.traced_dim);
    for (long i = 0; i < t.keep_dim; ++i) keep_off[i] = unrank(i, t.keep_dims, t.keep_strides);
    for (long r = 0; r < t.traced_dim; ++r) traced_off[r] = unrank(r, t.traced_dims, t.traced_strides);
    // Gather psi into a (keep_dim x traced_dim) matrix, then rho = M M^dag.
    Matrix m(t.keep_dim, t.traced_dim);
    for (long i = 0; i < t.keep_dim; ++i) {
        for (long r = 0; r < t.traced_dim; ++r) {
            m(i, r) = psi.amps[keep_off[i] + traced_off[r]];
        }
    }
    ModeShape sh;
    for (int mm : keep) sh.dims.push_back(psi.shape.dims[mm]);
    return Operator{m * m.adjoint(), std::move(sh)};
}

Ket apply_on_modes(const Operator& u, const Ket& psi, int first_mode, int n_modes) {
    if (first_mode < 0 || first_mode + n_modes > psi.shape.n_modes()) {
        throw ShapeMismatch("apply_on_modes: mode range out of bounds");
    }
    long front = 1, mid = 1, back = 1;
    for (int m = 0; m < first_mode; ++m) front *= psi.shape.dims[m];
    for (int m = first_mode; m < first_mode + n_modes; ++m) mid *= psi.shape.dims[m];
    for (int m = first_mode + n_modes; m < psi.shape.n_modes(); ++m) back *= psi.shape.dims[m];
    if (u.mat.rows() != mid || u.mat.cols() != mid) {
        throw ShapeMismatch("apply_on_modes: operator dimension mismatch");
    }
    Vector out(psi.amps.size());
    if (back == 1) {
        Eigen::Map<const Matrix> in_m(psi.amps.data(), mid, front); // column f = block f
        Eigen::Map<Matrix> out_m(out.data(), mid, front);
        out_m = u.mat * in_m;
    } else {
        for (long f = 0; f < front; ++f) {
            Eigen::Map<const Matrix> in_m(psi.amps.data() + f * mid * back, back, mid);
            Eigen::Map<Matrix> out_m(out.data() + f * mid * back, back, mid);
            out_m = in_m * u.mat.transpose();
        }
    }
    return Ket{std::move(out), psi.shape};
}

Operator identity_op(const ModeShape& shape) {
    long d = shape.dim();
    return Operator{Matrix::Identity(d, d), shape};
}

Ket basis_ket(const ModeShape& shape, const std::vector<int>& levels) {
    if (int(levels.size()) != shape.n_modes()) throw ShapeMismatch("basis_ket: wrong level count");
    auto strides = shape.strides();
    long idx = 0;
    for (int m = 0; m < shape.n_modes(); ++m) {
        if (levels[m] < 0 || levels[m] >= shape.dims[m]) throw ShapeMismatch("basis_ket: level out of range");
        idx += levels[m] * strides[m];
    }
    Vector v = Vector::Zero(shape.dim());
    v[idx] = 1.0;
    return Ket{std::move(v), shape};
}

} // namespace catwit
