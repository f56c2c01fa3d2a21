#pragma once

#include <complex>
#include <vector>

#include "qgrav/loops.hpp"
#include "qgrav/meanfield.hpp"

namespace qgrav::oracle {

using cdbl = std::complex<double>;

// Minimal dense complex matrix, row-major.
struct CMat {
    int n = 0;
    std::vector<cdbl> a;

    CMat() = default;
    explicit CMat(int dim) : n(dim), a(size_t(dim) * dim, cdbl{0, 0}) {}
    cdbl& operator()(int i, int j) { return a[size_t(i) * n + j]; }
    const cdbl& operator()(int i, int j) const { return a[size_t(i) * n + j]; }

    static CMat identity(int dim) {
        CMat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }
    CMat dagger() const;
    double inf_norm() const;
    friend CMat operator*(const CMat& x, const CMat& y);
    friend CMat operator+(const CMat& x, const CMat& y);
    friend CMat operator-(const CMat& x, const CMat& y);
    CMat scaled(cdbl s) const;
};

// Pade scaling-and-squaring matrix exponential (target accuracy ~1e-12 for
// the moderate norms used here).
CMat expm(const CMat& m);

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations;
// returns eigenvalues and the unitary of column eigenvectors.
void hermitian_eig(const CMat& m, std::vector<double>& eigs, CMat& vecs);

struct FockConfig {
    int dim_light = 64;
    int dim_mech = 24;
    Deformation model = Deformation::none;
    double strength = 0.0;  // numeric beta / gamma / mu
    double lambda0 = 0.05;
    double k = 0.0;
    int k_order = 0;
};

// Mechanical quadratures on the truncated Fock space, with the first-order
// deformed-momentum (or rescaled-position) representation.
CMat mech_position(const FockConfig& cfg);
CMat mech_momentum(const FockConfig& cfg);

// Tr(U^dag a U |alpha><alpha| x rho_th) evaluated blockwise over the optical
// number basis.
meanfield::MeanFieldResult simulate_loop(const loops::LoopSpec& loop, const FockConfig& cfg,
                                         cdbl alpha, double nbar);

// Max |[x,p] - i(1 + correction)| over the bulk of the truncated space
// (top 20% of levels excluded).
double commutator_check(const FockConfig& cfg);

// Max |U^dag U - 1| for the composed loop unitary at optical level n.
double unitarity_defect(const loops::LoopSpec& loop, const FockConfig& cfg, int n);

// Dense moments of D(alpha) S(r) |0>: photon number, its spread, and the
// tangential phase spread Delta P / |alpha|.
struct SqueezedMoments {
    double N_p = 0;
    double dNp = 0;
    double dPhi = 0;
};
SqueezedMoments squeezed_state_moments(cdbl alpha, double r, int dim);

}  // namespace qgrav::oracle
