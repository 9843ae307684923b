#pragma once

#include <cassert>
#include <cmath>
#include <vector>

namespace ple::ad {

/// Flat reverse-mode tape. Every primitive records at most two parents with
/// constant local partials; backward() is a single reverse sweep.
class Tape {
public:
    struct Node {
        int a = -1;
        int b = -1;
        double da = 0.0;
        double db = 0.0;
    };

    int leaf(double value) {
        values_.push_back(value);
        nodes_.push_back({});
        return static_cast<int>(values_.size()) - 1;
    }

    int unary(int a, double value, double da) {
        values_.push_back(value);
        nodes_.push_back({a, -1, da, 0.0});
        return static_cast<int>(values_.size()) - 1;
    }

    int binary(int a, int b, double value, double da, double db) {
        values_.push_back(value);
        nodes_.push_back({a, b, da, db});
        return static_cast<int>(values_.size()) - 1;
    }

    double value(int i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    /// Adjoints of every node with respect to node `output`.
    std::vector<double> gradient(int output) const {
        std::vector<double> adj(values_.size(), 0.0);
        adj[output] = 1.0;
        for (int i = static_cast<int>(values_.size()) - 1; i >= 0; --i) {
            double a = adj[i];
            if (a == 0.0) continue;
            const Node& n = nodes_[i];
            if (n.a >= 0) adj[n.a] += n.da * a;
            if (n.b >= 0) adj[n.b] += n.db * a;
        }
        return adj;
    }

private:
    std::vector<Node> nodes_;
    std::vector<double> values_;
};

/// Handle to one tape node; cheap to copy. Arithmetic on Var records onto the
/// owning tape, so a function templated on its scalar type runs both as plain
/// double evaluation and as a recorded forward pass.
struct Var {
    Tape* tape = nullptr;
    int idx = -1;

    double value() const { return tape->value(idx); }
};

inline Var make_var(Tape& t, double v) { return Var{&t, t.leaf(v)}; }

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }

inline Var operator+(Var a, Var b) {
    return {a.tape, a.tape->binary(a.idx, b.idx, a.value() + b.value(), 1.0, 1.0)};
}
inline Var operator+(Var a, double c) { return {a.tape, a.tape->unary(a.idx, a.value() + c, 1.0)}; }
inline Var operator+(double c, Var a) { return a + c; }

inline Var operator-(Var a, Var b) {
    return {a.tape, a.tape->binary(a.idx, b.idx, a.value() - b.value(), 1.0, -1.0)};
}
inline Var operator-(Var a, double c) { return {a.tape, a.tape->unary(a.idx, a.value() - c, 1.0)}; }
inline Var operator-(double c, Var a) { return {a.tape, a.tape->unary(a.idx, c - a.value(), -1.0)}; }
inline Var operator-(Var a) { return {a.tape, a.tape->unary(a.idx, -a.value(), -1.0)}; }

inline Var operator*(Var a, Var b) {
    return {a.tape, a.tape->binary(a.idx, b.idx, a.value() * b.value(), b.value(), a.value())};
}
inline Var operator*(Var a, double c) { return {a.tape, a.tape->unary(a.idx, a.value() * c, c)}; }
inline Var operator*(double c, Var a) { return a * c; }

inline Var operator/(Var a, Var b) {
    double bv = b.value();
    return {a.tape,
            a.tape->binary(a.idx, b.idx, a.value() / bv, 1.0 / bv, -a.value() / (bv * bv))};
}
inline Var operator/(Var a, double c) { return a * (1.0 / c); }
inline Var operator/(double c, Var a) {
    double av = a.value();
    return {a.tape, a.tape->unary(a.idx, c / av, -c / (av * av))};
}

inline Var log(Var a) { return {a.tape, a.tape->unary(a.idx, std::log(a.value()), 1.0 / a.value())}; }
inline Var exp(Var a) {
    double e = std::exp(a.value());
    return {a.tape, a.tape->unary(a.idx, e, e)};
}
inline Var sqrt(Var a) {
    double s = std::sqrt(a.value());
    return {a.tape, a.tape->unary(a.idx, s, 0.5 / s)};
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline Var relu(Var a) {
    double v = a.value();
    return {a.tape, a.tape->unary(a.idx, relu(v), v > 0.0 ? 1.0 : 0.0)};
}

inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
inline Var softplus(Var a) {
    double v = a.value();
    double sig = 1.0 / (1.0 + std::exp(-v));
    return {a.tape, a.tape->unary(a.idx, softplus(v), sig)};
}

inline double maximum(double a, double b) { return a > b ? a : b; }
inline Var maximum(Var a, Var b) {
    bool left = a.value() >= b.value();
    return {a.tape, a.tape->binary(a.idx, b.idx, left ? a.value() : b.value(), left ? 1.0 : 0.0,
                                   left ? 0.0 : 1.0)};
}

}  // namespace ple::ad
