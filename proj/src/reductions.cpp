#include "mmv/reductions.hpp"

#include "mmv/errors.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mmv {

namespace {

void require_boolean_square(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c) {
    const std::size_t n = a.rows();
    if (!a.is_square() || b.rows() != n || b.cols() != n || c.rows() != n || c.cols() != n) {
        throw UsageError("Boolean reduction needs square matrices of equal dimension");
    }
    for (const DenseIntMatrix* m : {&a, &b, &c}) {
        for (const std::int64_t x : m->data()) {
            if (x != 0 && x != 1) {
                throw UsageError("Boolean reduction needs 0/1 entries, found " + std::to_string(x));
            }
        }
    }
}

void write_line(std::ostream& os, const std::vector<std::int64_t>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        os << (i ? " " : "") << xs[i];
    }
    os << '\n';
}

void sort_unique(std::vector<std::int64_t>& xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

} // namespace

OnesCertificate bmm_ones_certificate(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c) {
    require_boolean_square(a, b, c);
    const std::size_t n = a.rows();
    OnesCertificate cert;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (c.at(i, j) == 0) {
                continue;
            }
            std::size_t k = 0;
            while (k < n && !(a.at(i, k) == 1 && b.at(k, j) == 1)) {
                ++k;
            }
            if (k == n) {
                cert.failure = std::make_pair(i, j);
                return cert;
            }
            cert.witnesses.push_back({i, j, k});
        }
    }
    return cert;
}

ThreeSumInstance bmm_zeroes_to_3sum(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c) {
    require_boolean_square(a, b, c);
    const std::size_t n = a.rows();
    ThreeSumInstance inst;
    const std::int64_t w = 2 * (static_cast<std::int64_t>(n) + 1);
    inst.w = w;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (a.at(i, k) == 1) {
                inst.s1.push_back(static_cast<std::int64_t>(i + 1) * w * w + static_cast<std::int64_t>(k + 1));
            }
            if (b.at(k, i) == 1) {
                inst.s2.push_back(static_cast<std::int64_t>(i + 1) * w - static_cast<std::int64_t>(k + 1));
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (c.at(i, j) == 0) {
                const std::int64_t v = static_cast<std::int64_t>(i + 1) * w * w + static_cast<std::int64_t>(j + 1) * w;
                inst.s3.push_back(v);
                inst.zero_map.emplace(v, std::make_pair(i, j));
            }
        }
    }
    sort_unique(inst.s1);
    sort_unique(inst.s2);
    sort_unique(inst.s3);
    return inst;
}

std::optional<std::array<std::int64_t, 3>> three_sum_find(const std::vector<std::int64_t>& s1,
                                                          const std::vector<std::int64_t>& s2,
                                                          const std::vector<std::int64_t>& s3,
                                                          std::uint64_t budget) {
    const u128 pairs = static_cast<u128>(s1.size()) * s2.size();
    if (pairs > budget) {
        throw ResourceError("3SUM brute force needs " + to_decimal(static_cast<i128>(pairs)) +
                            " pairs, over the budget of " + std::to_string(budget));
    }
    const std::unordered_set<std::int64_t> targets(s3.begin(), s3.end());
    for (const std::int64_t x : s1) {
        for (const std::int64_t y : s2) {
            if (targets.contains(x + y)) {
                return std::array<std::int64_t, 3>{x, y, x + y};
            }
        }
    }
    return std::nullopt;
}

bool three_sum_bruteforce(const std::vector<std::int64_t>& s1, const std::vector<std::int64_t>& s2,
                          const std::vector<std::int64_t>& s3, std::uint64_t budget) {
    return three_sum_find(s1, s2, s3, budget).has_value();
}

void write_three_sum(std::ostream& os, const ThreeSumInstance& inst) {
    write_line(os, inst.s1);
    write_line(os, inst.s2);
    write_line(os, inst.s3);
}

// ---------------------------------------------------------------- circuits

namespace {

class CircuitBuilder {
public:
    explicit CircuitBuilder(const FieldCtx& ctx) {
        circ_.modulus = ctx.modulus();
        push({GateOp::input, 0, 0, 0}, 1);
    }

    std::uint32_t input() const noexcept { return 0; }

    std::uint32_t constant(Elem v) {
        const auto it = constants_.find(v);
        if (it != constants_.end()) {
            return it->second;
        }
        const std::uint32_t g = push({GateOp::constant, v, 0, 0}, 0);
        constants_.emplace(v, g);
        return g;
    }

    std::uint32_t add(std::uint32_t x, std::uint32_t y) {
        return push({GateOp::add, 0, x, y}, std::max(degree_[x], degree_[y]));
    }

    std::uint32_t mul(std::uint32_t x, std::uint32_t y) { return push({GateOp::mul, 0, x, y}, degree_[x] + degree_[y]); }

    /// Horner chain for sum_s c_s Z^s at gate z; c must have a nonzero entry.
    std::uint32_t horner(const std::vector<Elem>& c, std::uint32_t z) {
        std::size_t s = c.size() - 1;
        while (c[s] == 0) {
            --s;
        }
        std::uint32_t h = constant(c[s]);
        while (s-- > 0) {
            h = mul(h, z);
            if (c[s] != 0) {
                h = add(h, constant(c[s]));
            }
        }
        return h;
    }

    std::uint32_t power(std::uint32_t x, std::size_t e) {
        // Left-to-right square and multiply; e >= 1.
        int top = 63;
        while (!((e >> top) & 1)) {
            --top;
        }
        std::uint32_t acc = x;
        for (int bit = top - 1; bit >= 0; --bit) {
            acc = mul(acc, acc);
            if ((e >> bit) & 1) {
                acc = mul(acc, x);
            }
        }
        return acc;
    }

    std::uint32_t sum(std::vector<std::uint32_t> xs) {
        if (xs.empty()) {
            return constant(0);
        }
        while (xs.size() > 1) {
            std::vector<std::uint32_t> next;
            for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
                next.push_back(add(xs[i], xs[i + 1]));
            }
            if (xs.size() % 2) {
                next.push_back(xs.back());
            }
            xs.swap(next);
        }
        return xs.front();
    }

    CircuitDesc finish(std::uint32_t out) {
        circ_.output = out;
        circ_.degree = degree_[out];
        return std::move(circ_);
    }

private:
    std::uint32_t push(Gate g, std::size_t degree) {
        if (g.op == GateOp::add || g.op == GateOp::mul) {
            circ_.wire_count += 2;
        }
        circ_.gates.push_back(g);
        degree_.push_back(degree);
        return static_cast<std::uint32_t>(circ_.gates.size() - 1);
    }

    CircuitDesc circ_;
    std::vector<std::size_t> degree_;
    std::unordered_map<Elem, std::uint32_t> constants_;
};

const char* op_name(GateOp op) noexcept {
    switch (op) {
    case GateOp::input:
        return "INPUT";
    case GateOp::constant:
        return "CONST";
    case GateOp::add:
        return "ADD";
    case GateOp::mul:
        return "MUL";
    }
    return "?";
}

} // namespace

CircuitDesc emit_upit_circuit(const DenseIntMatrix& a, const DenseIntMatrix& b, const FieldCtx& ctx) {
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    if (b.rows() != m || b.cols() != n) {
        throw UsageError("circuit emission needs A l x m and B m x l");
    }
    CircuitBuilder cb(ctx);
    std::optional<std::uint32_t> x_pow_n;
    std::vector<std::uint32_t> products;
    std::vector<Elem> q(n), r(n);
    for (std::size_t k = 0; k < m; ++k) {
        bool q_zero = true;
        bool r_zero = true;
        for (std::size_t s = 0; s < n; ++s) {
            q[s] = ctx.from_int(a.at(s, k));
            r[s] = ctx.from_int(b.at(k, s));
            q_zero = q_zero && q[s] == 0;
            r_zero = r_zero && r[s] == 0;
        }
        if (q_zero || r_zero) {
            continue;
        }
        if (!x_pow_n) {
            x_pow_n = cb.power(cb.input(), n);
        }
        const std::uint32_t qk = cb.horner(q, cb.input());
        const std::uint32_t rk = cb.horner(r, *x_pow_n);
        products.push_back(cb.mul(qk, rk));
    }
    return cb.finish(cb.sum(std::move(products)));
}

Elem eval_circuit(const CircuitDesc& circ, Elem x, const FieldCtx& ctx) {
    if (circ.gates.empty() || circ.output >= circ.gates.size()) {
        throw ValidationError("circuit output gate is out of range");
    }
    std::vector<Elem> val(circ.gates.size());
    for (std::size_t g = 0; g < circ.gates.size(); ++g) {
        const Gate& gate = circ.gates[g];
        switch (gate.op) {
        case GateOp::input:
            val[g] = x;
            break;
        case GateOp::constant:
            val[g] = gate.value % ctx.modulus();
            break;
        case GateOp::add:
        case GateOp::mul:
            if (gate.lhs >= g || gate.rhs >= g) {
                throw ValidationError("gate g" + std::to_string(g) + " reads a gate that does not precede it");
            }
            val[g] = gate.op == GateOp::add ? ctx.add(val[gate.lhs], val[gate.rhs])
                                            : ctx.mul(val[gate.lhs], val[gate.rhs]);
            break;
        default:
            throw ValidationError("gate g" + std::to_string(g) + " has an unknown operation");
        }
    }
    return val[circ.output];
}

void write_circuit(std::ostream& os, const CircuitDesc& circ) {
    os << "# modulus " << circ.modulus << " gates " << circ.gates.size() << " wires " << circ.wire_count
       << " degree " << circ.degree << '\n';
    for (std::size_t g = 0; g < circ.gates.size(); ++g) {
        const Gate& gate = circ.gates[g];
        os << 'g' << g << " = " << op_name(gate.op);
        if (gate.op == GateOp::constant) {
            os << ' ' << gate.value;
        } else if (gate.op != GateOp::input) {
            os << " g" << gate.lhs << " g" << gate.rhs;
        }
        os << '\n';
    }
    os << "OUTPUT g" << circ.output << '\n';
}

namespace {

std::uint32_t parse_gate_ref(const std::string& tok, std::size_t line) {
    if (tok.size() < 2 || tok[0] != 'g' || tok.find_first_not_of("0123456789", 1) != std::string::npos) {
        throw ParseError(line, "expected a gate reference, got '" + tok + "'");
    }
    try {
        return static_cast<std::uint32_t>(std::stoul(tok.substr(1)));
    } catch (const std::exception&) {
        throw ParseError(line, "gate index out of range: " + tok);
    }
}

} // namespace

CircuitDesc read_circuit(std::istream& is) {
    CircuitDesc circ;
    std::vector<std::size_t> degree;
    std::string text;
    std::size_t line = 0;
    bool have_output = false;
    while (std::getline(is, text)) {
        ++line;
        std::istringstream ls(text);
        std::string head;
        if (!(ls >> head)) {
            continue;
        }
        if (head[0] == '#') {
            if (head == "#") {
                std::string key;
                if (ls >> key && key == "modulus") {
                    ls >> circ.modulus;
                }
            }
            continue;
        }
        if (have_output) {
            throw ParseError(line, "content after OUTPUT");
        }
        if (head == "OUTPUT") {
            std::string ref;
            if (!(ls >> ref)) {
                throw ParseError(line, "OUTPUT needs a gate reference");
            }
            circ.output = parse_gate_ref(ref, line);
            have_output = true;
            continue;
        }
        const std::uint32_t idx = parse_gate_ref(head, line);
        if (idx != circ.gates.size()) {
            throw ParseError(line, "gates must be numbered consecutively from g0");
        }
        std::string eq, op;
        if (!(ls >> eq >> op) || eq != "=") {
            throw ParseError(line, "expected 'gN = OP ...'");
        }
        Gate g;
        std::size_t deg = 0;
        if (op == "INPUT") {
            g.op = GateOp::input;
            deg = 1;
        } else if (op == "CONST") {
            g.op = GateOp::constant;
            if (!(ls >> g.value)) {
                throw ParseError(line, "CONST needs a value");
            }
        } else if (op == "ADD" || op == "MUL") {
            g.op = op == "ADD" ? GateOp::add : GateOp::mul;
            std::string l, r;
            if (!(ls >> l >> r)) {
                throw ParseError(line, op + " needs two operands");
            }
            g.lhs = parse_gate_ref(l, line);
            g.rhs = parse_gate_ref(r, line);
            if (g.lhs >= idx || g.rhs >= idx) {
                throw ParseError(line, "operand does not precede its gate");
            }
            deg = g.op == GateOp::add ? std::max(degree[g.lhs], degree[g.rhs]) : degree[g.lhs] + degree[g.rhs];
            circ.wire_count += 2;
        } else {
            throw ParseError(line, "unknown operation '" + op + "'");
        }
        std::string extra;
        if (ls >> extra) {
            throw ParseError(line, "trailing token '" + extra + "'");
        }
        circ.gates.push_back(g);
        degree.push_back(deg);
    }
    if (!have_output) {
        throw ParseError(line + 1, "missing OUTPUT line");
    }
    if (circ.output >= circ.gates.size()) {
        throw ParseError(line, "OUTPUT refers to a missing gate");
    }
    circ.degree = degree[circ.output];
    return circ;
}

} // namespace mmv
