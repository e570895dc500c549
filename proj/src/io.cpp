#include "mlsos/io.hpp"

#include <fstream>
#include <sstream>

namespace mlsos::io {

namespace {

int line_of_offset(const std::string& text, size_t offset) {
    int line = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError("json syntax error at line " + std::to_string(line_of_offset(text, e.byte)) +
                         ": " + e.what());
    }
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw InputError(where + ": unknown field '" + it.key() + "'");
    }
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw InputError(where + ": expected a number");
    return v.get<double>();
}

linalg::Vector parse_vector(const json& v, const std::string& where) {
    if (!v.is_array()) throw InputError(where + ": expected an array");
    linalg::Vector out(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        out(i) = get_number(v[i], where + "[" + std::to_string(i) + "]");
    return out;
}

linalg::Matrix parse_matrix(const json& v, int expect_cols, const std::string& where) {
    if (!v.is_array()) throw InputError(where + ": expected an array of rows");
    const int rows = static_cast<int>(v.size());
    int cols = expect_cols;
    if (rows > 0 && cols < 0) cols = static_cast<int>(v[0].size());
    linalg::Matrix out(rows, std::max(cols, 0));
    for (int i = 0; i < rows; ++i) {
        const json& r = v[i];
        if (!r.is_array() || static_cast<int>(r.size()) != cols)
            throw InputError(where + " row " + std::to_string(i + 1) + ": expected " +
                             std::to_string(cols) + " entries, got " + std::to_string(r.size()));
        for (int j = 0; j < cols; ++j)
            out(i, j) = get_number(r[j], where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    return out;
}

json matrix_to_json(const linalg::Matrix& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

json vector_to_json(const linalg::Vector& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json block_point_to_json(const mlp::BlockPoint& bp) {
    json a = json::array();
    for (const auto& v : bp) a.push_back(vector_to_json(v));
    return a;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

mlp::MultilinearProgram parse_problem(const std::string& text) {
    const json root = parse_json(text);
    if (!root.is_object()) throw InputError("problem file: expected a JSON object");
    reject_unknown(root, "problem file", {"blocks", "objective", "sense"});
    if (!root.contains("blocks") || !root.contains("objective") || !root.contains("sense"))
        throw InputError("problem file: 'blocks', 'objective' and 'sense' are required");

    mlp::MultilinearProgram p;

    const json& blocks = root["blocks"];
    if (!blocks.is_array() || blocks.size() < 2)
        throw InputError("blocks: need at least two blocks");
    std::vector<int> dims;
    for (size_t bi = 0; bi < blocks.size(); ++bi) {
        const std::string where = "blocks[" + std::to_string(bi + 1) + "]";
        const json& b = blocks[bi];
        if (!b.is_object()) throw InputError(where + ": expected an object");
        reject_unknown(b, where, {"name", "dim", "A", "a", "B", "b"});
        if (!b.contains("dim")) throw InputError(where + ".dim: required");
        const int dim = b["dim"].get<int>();
        if (dim < 1) throw InputError(where + ".dim: must be positive");
        linalg::Matrix A(0, dim), B(0, dim);
        linalg::Vector a(0), bb(0);
        if (b.contains("A")) A = parse_matrix(b["A"], dim, where + ".A");
        if (b.contains("a")) a = parse_vector(b["a"], where + ".a");
        if (b.contains("B")) B = parse_matrix(b["B"], dim, where + ".B");
        if (b.contains("b")) bb = parse_vector(b["b"], where + ".b");
        if (A.rows() != a.size())
            throw InputError(where + ": A has " + std::to_string(A.rows()) + " rows but a has " +
                             std::to_string(a.size()) + " entries");
        if (B.rows() != bb.size())
            throw InputError(where + ": B has " + std::to_string(B.rows()) + " rows but b has " +
                             std::to_string(bb.size()) + " entries");
        p.blocks.push_back(polytope::HPolytope::make(dim, std::move(A), std::move(a), std::move(B),
                                                     std::move(bb)));
        dims.push_back(dim);
    }

    p.objective.l = static_cast<int>(dims.size());
    p.objective.block_dims = dims;

    const json& obj = root["objective"];
    if (!obj.is_array()) throw InputError("objective: expected an array of tensor groups");
    for (size_t gi = 0; gi < obj.size(); ++gi) {
        const std::string where = "objective[" + std::to_string(gi + 1) + "]";
        const json& g = obj[gi];
        reject_unknown(g, where, {"subset", "entries"});
        if (!g.contains("subset") || !g.contains("entries"))
            throw InputError(where + ": 'subset' and 'entries' are required");
        mlp::Subset L = 0;
        std::vector<int> members;
        for (const json& s : g["subset"]) {
            const int blk = s.get<int>();
            if (blk < 1 || blk > p.objective.l)
                throw InputError(where + ".subset: block index " + std::to_string(blk) + " out of range");
            if (L & (1u << (blk - 1))) throw InputError(where + ".subset: duplicate block index");
            L |= 1u << (blk - 1);
        }
        if (L == 0) throw InputError(where + ".subset: must be nonempty");
        for (int i = 0; i < p.objective.l; ++i)
            if (L & (1u << i)) members.push_back(i);
        for (size_t ei = 0; ei < g["entries"].size(); ++ei) {
            const std::string ew = where + ".entries[" + std::to_string(ei + 1) + "]";
            const json& entry = g["entries"][ei];
            reject_unknown(entry, ew, {"index", "value"});
            if (!entry.contains("index") || !entry.contains("value"))
                throw InputError(ew + ": 'index' and 'value' are required");
            const json& idx = entry["index"];
            if (idx.size() != members.size())
                throw InputError(ew + ".index: expected " + std::to_string(members.size()) +
                                 " coordinates");
            std::vector<int> coords;
            for (size_t k = 0; k < idx.size(); ++k) {
                const int c = idx[k].get<int>();
                if (c < 1 || c > dims[members[k]])
                    throw InputError(ew + ".index: coordinate " + std::to_string(c) +
                                     " out of range for block " + std::to_string(members[k] + 1));
                coords.push_back(c - 1);
            }
            p.objective.add(L, coords, get_number(entry["value"], ew + ".value"));
        }
    }

    const std::string sense = root["sense"].get<std::string>();
    if (sense == "max")
        p.sense = mlp::Sense::Max;
    else if (sense == "min")
        p.sense = mlp::Sense::Min;
    else
        throw InputError("sense: expected \"max\" or \"min\"");
    return p;
}

json emit_problem(const mlp::MultilinearProgram& p) {
    json root;
    root["sense"] = (p.sense == mlp::Sense::Max) ? "max" : "min";
    json blocks = json::array();
    for (const auto& blk : p.blocks) {
        json b;
        b["dim"] = blk.dim;
        b["A"] = matrix_to_json(blk.A);
        b["a"] = vector_to_json(blk.a);
        if (blk.num_eq() > 0) {
            b["B"] = matrix_to_json(blk.B);
            b["b"] = vector_to_json(blk.b);
        }
        blocks.push_back(std::move(b));
    }
    root["blocks"] = std::move(blocks);
    json obj = json::array();
    for (const auto& [L, tensor] : p.objective.tensors) {
        json g;
        json subset = json::array();
        for (int i = 0; i < p.objective.l; ++i)
            if (L & (1u << i)) subset.push_back(i + 1);
        g["subset"] = std::move(subset);
        json entries = json::array();
        for (const auto& [idx, v] : tensor) {
            json e;
            json coords = json::array();
            for (int c : idx) coords.push_back(c + 1);
            e["index"] = std::move(coords);
            e["value"] = v;
            entries.push_back(std::move(e));
        }
        g["entries"] = std::move(entries);
        obj.push_back(std::move(g));
    }
    root["objective"] = std::move(obj);
    return root;
}

apps::BimatrixGame parse_game(const std::string& text) {
    const json root = parse_json(text);
    if (!root.is_object()) throw InputError("game file: expected a JSON object");
    reject_unknown(root, "game file", {"A", "B"});
    if (!root.contains("A") || !root.contains("B"))
        throw InputError("game file: 'A' and 'B' are required");
    linalg::Matrix A = parse_matrix(root["A"], -1, "A");
    linalg::Matrix B = parse_matrix(root["B"], static_cast<int>(A.cols()), "B");
    if (A.rows() != B.rows())
        throw InputError("game file: A and B must have the same shape");
    return apps::shift_positive(A, B);
}

apps::ContainmentInstance parse_containment(const std::string& text) {
    const json root = parse_json(text);
    if (!root.is_object()) throw InputError("containment file: expected a JSON object");
    reject_unknown(root, "containment file", {"P", "Q"});
    if (!root.contains("P") || !root.contains("Q"))
        throw InputError("containment file: 'P' and 'Q' are required");
    const json& P = root["P"];
    const json& Q = root["Q"];
    reject_unknown(P, "P", {"A", "a"});
    reject_unknown(Q, "Q", {"B", "b", "Bprime"});
    if (!P.contains("A") || !P.contains("a")) throw InputError("P: 'A' and 'a' are required");
    if (!Q.contains("B") || !Q.contains("b")) throw InputError("Q: 'B' and 'b' are required");

    apps::ContainmentInstance c;
    c.P_A = parse_matrix(P["A"], -1, "P.A");
    c.P_a = parse_vector(P["a"], "P.a");
    if (c.P_A.rows() != c.P_a.size()) throw InputError("P: A rows and a length disagree");
    c.Q_B = parse_matrix(Q["B"], static_cast<int>(c.P_A.cols()), "Q.B");
    c.Q_b = parse_vector(Q["b"], "Q.b");
    if (c.Q_B.rows() != c.Q_b.size()) throw InputError("Q: B rows and b length disagree");
    if (Q.contains("Bprime") && !Q["Bprime"].empty()) {
        c.Q_Bprime = parse_matrix(Q["Bprime"], -1, "Q.Bprime");
        if (c.Q_Bprime.rows() != c.Q_B.rows())
            throw InputError("Q: Bprime must have one row per inequality of Q");
    } else {
        c.Q_Bprime = linalg::Matrix(0, 0);
    }
    return c;
}

json report_to_json(const mlp::MultilinearProgram& p, const hierarchy::HierarchyReport& rep,
                    const std::string& digest, double wall_seconds) {
    const bool neg = p.negated;
    auto outv = [&](double v) { return neg ? -v : v; };

    json root;
    root["input_digest"] = digest;
    root["sense"] = neg ? "min" : "max";
    json orders = json::array();
    for (const auto& r : rep.orders) {
        json o;
        o["t"] = r.t;
        if (std::isfinite(r.f_t))
            o["f_t"] = outv(r.f_t);
        else
            o["f_t"] = nullptr;  // infeasible relaxation at this order
        o["relaxation_infeasible"] = r.relaxation_infeasible;
        o["sdp_status"] = sdp::to_string(r.sdp_status);
        o["certificate_verified"] = r.cert_report.passed;
        o["certificate_residual"] = r.cert_report.max_residual;
        if (r.candidate) o["moment_candidate"] = block_point_to_json(*r.candidate);
        o["wall_seconds"] = r.wall_seconds;
        orders.push_back(std::move(o));
    }
    root["orders"] = std::move(orders);

    // For a Max program the relaxation bounds from above and feasible points
    // bound from below; a Min program flips both.
    const double upper = neg ? -rep.best_lower : rep.best_upper;
    const double lower = neg ? -rep.best_upper : rep.best_lower;
    root["best_upper"] = std::isfinite(upper) ? json(upper) : json(nullptr);
    root["best_lower"] = std::isfinite(lower) ? json(lower) : json(nullptr);
    if (rep.witness) root["witness"] = block_point_to_json(*rep.witness);
    root["gap"] = std::isfinite(rep.gap) ? json(rep.gap) : json(nullptr);
    root["status"] = hierarchy::to_string(rep.status);
    if (!rep.notes.empty()) root["notes"] = rep.notes;
    root["wall_seconds_total"] = wall_seconds;
    return root;
}

std::string report_to_text(const mlp::MultilinearProgram& p, const hierarchy::HierarchyReport& rep) {
    const bool neg = p.negated;
    auto outv = [&](double v) { return neg ? -v : v; };
    std::ostringstream os;
    os.precision(12);
    os << "order  bound          sdp_status    certified\n";
    for (const auto& r : rep.orders) {
        os << "t=" << r.t << "   ";
        if (std::isfinite(r.f_t))
            os << outv(r.f_t);
        else
            os << "infeasible";
        os << "   " << sdp::to_string(r.sdp_status) << "   " << (r.cert_report.passed ? "yes" : "no")
           << "\n";
    }
    const double upper = neg ? -rep.best_lower : rep.best_upper;
    const double lower = neg ? -rep.best_upper : rep.best_lower;
    os << "best upper bound: " << upper << "\n";
    os << "best lower bound: " << lower << "\n";
    os << "gap: " << rep.gap << "\n";
    os << "status: " << hierarchy::to_string(rep.status) << "\n";
    for (const auto& n : rep.notes) os << "note: " << n << "\n";
    return os.str();
}

}  // namespace mlsos::io
