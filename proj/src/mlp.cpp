#include "mlsos/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "mlsos/lp.hpp"

namespace mlsos::mlp {

namespace {
std::vector<int> subset_members(Subset L) {
    std::vector<int> v;
    for (int i = 0; i < 32; ++i)
        if (L & (1u << i)) v.push_back(i);
    return v;
}
}  // namespace

void MultilinearForm::set(Subset L, const std::vector<int>& idx, double value) {
    tensors[L][idx] = value;
}

void MultilinearForm::add(Subset L, const std::vector<int>& idx, double value) {
    tensors[L][idx] += value;
}

bool MultilinearForm::has_top_tensor() const {
    const Subset top = (l >= 32) ? ~0u : ((1u << l) - 1u);
    auto it = tensors.find(top);
    if (it == tensors.end()) return false;
    for (const auto& [idx, v] : it->second)
        if (v != 0.0) return true;
    return false;
}

int MultilinearForm::total_vars() const {
    int n = 0;
    for (int d : block_dims) n += d;
    return n;
}

int MultilinearForm::var_offset(int block) const {
    int off = 0;
    for (int i = 0; i < block; ++i) off += block_dims[i];
    return off;
}

double eval(const MultilinearForm& f, const BlockPoint& x) {
    if (static_cast<int>(x.size()) != f.l) throw DimensionMismatch("eval: block count mismatch");
    for (int i = 0; i < f.l; ++i)
        if (x[i].size() != f.block_dims[i]) throw DimensionMismatch("eval: block dim mismatch");

    double total = 0.0;
    for (const auto& [L, tensor] : f.tensors) {
        const std::vector<int> mem = subset_members(L);
        for (const auto& [idx, q] : tensor) {
            double term = q;
            for (size_t k = 0; k < mem.size(); ++k) term *= x[mem[k]](idx[k]);
            total += term;
        }
    }
    return total;
}

Vector grad_block(const MultilinearForm& f, const BlockPoint& x, int block) {
    Vector g = Vector::Zero(f.block_dims[block]);
    for (const auto& [L, tensor] : f.tensors) {
        if (!(L & (1u << block))) continue;
        const std::vector<int> mem = subset_members(L);
        for (const auto& [idx, q] : tensor) {
            double coef = q;
            int my_coord = -1;
            for (size_t k = 0; k < mem.size(); ++k) {
                if (mem[k] == block)
                    my_coord = idx[k];
                else
                    coef *= x[mem[k]](idx[k]);
            }
            g(my_coord) += coef;
        }
    }
    return g;
}

poly::Poly to_poly(const MultilinearForm& f) {
    const int n = f.total_vars();
    poly::Poly p(n);
    for (const auto& [L, tensor] : f.tensors) {
        const std::vector<int> mem = subset_members(L);
        for (const auto& [idx, q] : tensor) {
            if (q == 0.0) continue;
            std::vector<int> expo(n, 0);
            for (size_t k = 0; k < mem.size(); ++k) expo[f.var_offset(mem[k]) + idx[k]] += 1;
            p.add_term(poly::Monomial(std::move(expo)), q);
        }
    }
    return p;
}

Vector flatten(const MultilinearForm& f, const BlockPoint& x) {
    Vector v(f.total_vars());
    int off = 0;
    for (int i = 0; i < f.l; ++i) {
        v.segment(off, f.block_dims[i]) = x[i];
        off += f.block_dims[i];
    }
    return v;
}

BlockPoint split(const MultilinearForm& f, const Vector& x) {
    BlockPoint pt;
    int off = 0;
    for (int i = 0; i < f.l; ++i) {
        pt.push_back(x.segment(off, f.block_dims[i]).eval());
        off += f.block_dims[i];
    }
    return pt;
}

void MultilinearProgram::prepare(bool strip_redundant) {
    if (l() < 2) throw DimensionMismatch("prepare: need at least two blocks");
    if (objective.l != l()) throw DimensionMismatch("prepare: objective block count mismatch");
    for (int i = 0; i < l(); ++i)
        if (objective.block_dims[i] != blocks[i].dim)
            throw DimensionMismatch("prepare: block " + std::to_string(i) + " dim mismatch");

    for (int i = 0; i < l(); ++i) {
        blocks[i] = polytope::normalize(blocks[i]);
        if (!polytope::is_bounded(blocks[i]))
            throw UnboundedBlock("prepare: block " + std::to_string(i) +
                                 " is unbounded; only polytopes are supported");
        if (strip_redundant) blocks[i] = polytope::remove_redundant(blocks[i]);
    }

    if (!objective.has_top_tensor())
        warnings.push_back("objective has no (or zero) top-order tensor Q over all blocks");

    if (sense == Sense::Min && !negated) {
        for (auto& [L, tensor] : objective.tensors)
            for (auto& [idx, v] : tensor) v = -v;
        negated = true;
    }

    vertex_cache.assign(l(), VertexSet{});
    prepared = true;
}

const VertexSet& MultilinearProgram::vertex_data(int block, std::uint64_t cap) {
    if (!prepared) throw DimensionMismatch("vertex_data: call prepare() first");
    if (vertex_cache[block].vertices.empty())
        vertex_cache[block] = polytope::vertices(blocks[block], cap);
    return vertex_cache[block];
}

OracleResult vertex_oracle(MultilinearProgram& p, double tol, std::uint64_t cap) {
    if (!p.prepared) throw DimensionMismatch("vertex_oracle: call prepare() first");
    const int l = p.l();

    std::uint64_t count = 1;
    for (int i = 0; i < l; ++i) {
        const std::uint64_t c = p.vertex_data(i).size();
        if (c == 0) throw DimensionMismatch("vertex_oracle: block has no vertices");
        if (count > cap / c + 1) throw CapExceeded("vertex_oracle: tuple count exceeds cap");
        count *= c;
    }
    if (count > cap) throw CapExceeded("vertex_oracle: tuple count exceeds cap");

    OracleResult res;
    res.tuples_scanned = count;

    std::vector<int> tup(l, 0);
    BlockPoint x(l);
    auto load = [&]() {
        for (int i = 0; i < l; ++i) x[i] = p.vertex_data(i).vertices[tup[i]];
    };
    auto advance = [&]() -> bool {
        for (int i = l - 1; i >= 0; --i) {
            if (++tup[i] < static_cast<int>(p.vertex_data(i).size())) return true;
            tup[i] = 0;
        }
        return false;
    };

    // Pass 1: maximum value.
    double best = -std::numeric_limits<double>::infinity();
    do {
        load();
        best = std::max(best, eval(p.objective, x));
    } while (advance());

    // Pass 2: collect tuples within the scale-aware band.
    const double band = tol * (1.0 + std::abs(best));
    std::fill(tup.begin(), tup.end(), 0);
    do {
        load();
        if (eval(p.objective, x) >= best - band) res.optimal_tuples.push_back(tup);
    } while (advance());

    res.value = best;
    return res;
}

bool optima_are_finite(const OracleResult& r, const MultilinearProgram& p) {
    (void)p;
    const auto& T = r.optimal_tuples;
    for (size_t i = 0; i < T.size(); ++i) {
        for (size_t j = i + 1; j < T.size(); ++j) {
            int diff = 0;
            for (size_t k = 0; k < T[i].size(); ++k)
                if (T[i][k] != T[j][k]) ++diff;
            if (diff == 1) return false;
        }
    }
    return true;
}

LocalSearchResult local_search(MultilinearProgram& p, const BlockPoint& start) {
    if (!p.prepared) throw DimensionMismatch("local_search: call prepare() first");
    const int l = p.l();

    BlockPoint x = start;
    double value = eval(p.objective, x);

    const int max_sweeps = 200;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double before = value;
        for (int i = 0; i < l; ++i) {
            const Vector g = grad_block(p.objective, x, i);
            const HPolytope& blk = p.blocks[i];
            lp::LpResult r = lp::solve_lp(lp::LpProblem::minimize(-g, blk.A, blk.a, blk.B, blk.b));
            if (r.status != lp::LpStatus::Optimal) continue;  // bounded blocks: should not happen
            BlockPoint cand = x;
            cand[i] = r.point;
            const double cv = eval(p.objective, cand);
            if (cv > value) {
                x = std::move(cand);
                value = cv;
            }
        }
        if (value - before <= 1e-9 * (1.0 + std::abs(value))) break;
    }
    return LocalSearchResult{value, std::move(x)};
}

}  // namespace mlsos::mlp
