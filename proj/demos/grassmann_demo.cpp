// Walks through the exact Grassmann layer: products, derivatives, the Berezin
// integral, and the determinant identity it reproduces.

#include <cstdio>

#include "supercube/grassmann.hpp"

using namespace supercube;

int main() {
    GeneratorRegistry reg(2);
    using E = GrassmannElement<Rational>;

    E xi1 = E::generator(reg, reg.xi(0));
    E eta1 = E::generator(reg, reg.eta(0));
    std::printf("xi1 * eta1      = %s\n", ext_mul(xi1, eta1).to_string().c_str());
    std::printf("eta1 * xi1      = %s\n", ext_mul(eta1, xi1).to_string().c_str());
    std::printf("xi1 * xi1       = %s\n", ext_mul(xi1, xi1).to_string().c_str());

    E one = E::scalar(reg, Rational(1));
    E pair1 = ext_mul(xi1, eta1);
    E pair2 = ext_mul(E::generator(reg, reg.xi(1)), E::generator(reg, reg.eta(1)));
    std::printf("(1+x1e1)(1+x2e2)= %s\n", ext_mul(one + pair1, one + pair2).to_string().c_str());

    std::printf("d/dxi1 (xi1 eta1) = %s\n", fermi_derive(pair1, reg.xi(0)).to_string().c_str());
    std::printf("d/deta1(xi1 eta1) = %s\n", fermi_derive(pair1, reg.eta(0)).to_string().c_str());

    Matrix<Rational> sigma(2, 2);
    sigma(0, 0) = Rational(2);
    sigma(0, 1) = Rational(1);
    sigma(1, 0) = Rational(1);
    sigma(1, 1) = Rational(2);
    std::printf("int exp(-xi^t S eta) = %s, det oracle = %s\n",
                gaussian_fermionic_integral(sigma).str().c_str(), det_bareiss(sigma).str().c_str());
    return 0;
}
