#include "mlsos/randgen.hpp"

#include <cmath>

namespace mlsos::randgen {

std::uint64_t Rng::next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

int Rng::uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(next_u64() % span);
}

polytope::HPolytope random_polytope(Rng& rng, int dim, int cuts) {
    using linalg::Matrix;
    using linalg::Vector;
    Matrix A(2 * dim + cuts, dim);
    Vector a(2 * dim + cuts);
    A.setZero();
    for (int i = 0; i < dim; ++i) {
        A(2 * i, i) = 1.0;
        a(2 * i) = 1.0;
        A(2 * i + 1, i) = -1.0;
        a(2 * i + 1) = 0.0;
    }
    const Vector center = Vector::Constant(dim, 0.5);
    for (int k = 0; k < cuts; ++k) {
        Vector u(dim);
        for (int i = 0; i < dim; ++i) u(i) = rng.uniform(-1.0, 1.0);
        if (u.norm() < 1e-6) u(0) = 1.0;
        u /= u.norm();
        const double margin = rng.uniform(0.15, 0.6);
        A.row(2 * dim + k) = u.transpose();
        a(2 * dim + k) = u.dot(center) + margin;
    }
    return polytope::HPolytope::from_inequalities(std::move(A), std::move(a));
}

mlp::MultilinearProgram random_program(Rng& rng, const std::vector<int>& dims, int cuts_per_block) {
    const int l = static_cast<int>(dims.size());
    mlp::MultilinearProgram p;
    for (int i = 0; i < l; ++i) p.blocks.push_back(random_polytope(rng, dims[i], cuts_per_block));
    p.objective.l = l;
    p.objective.block_dims = dims;

    for (mlp::Subset L = 1; L < (1u << l); ++L) {
        std::vector<int> members;
        for (int i = 0; i < l; ++i)
            if (L & (1u << i)) members.push_back(i);
        std::vector<int> idx(members.size(), 0);
        for (;;) {
            p.objective.set(L, idx, rng.uniform(-1.0, 1.0));
            int pos = static_cast<int>(members.size()) - 1;
            while (pos >= 0 && ++idx[pos] == dims[members[pos]]) idx[pos--] = 0;
            if (pos < 0) break;
        }
    }
    p.sense = mlp::Sense::Max;
    return p;
}

}  // namespace mlsos::randgen
