#pragma once

// Random well-scoped programs for the store machine tests. Random choices
// stay outside loops so the branch count remains small.

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace dynsem::testing {

class ProgramGenerator {
public:
    explicit ProgramGenerator(unsigned seed) : rng_(seed) {}

    std::string program() {
        scope_.clear();
        randoms_ = 0;
        fresh_ = 0;
        loops_ = 0;
        std::ostringstream os;
        os << block(3);
        return os.str();
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    std::string name() { return "v" + std::to_string(fresh_++); }

    std::string var() { return scope_[static_cast<std::size_t>(pick(0, static_cast<int>(scope_.size()) - 1))]; }

    std::string expr(int depth) {
        if (depth <= 0 || pick(0, 2) == 0) {
            if (scope_.empty() || pick(0, 2) == 0) return std::to_string(pick(0, 3));
            return var();
        }
        switch (pick(0, 4)) {
        case 0:
            return "(" + expr(depth - 1) + " + " + expr(depth - 1) + ")";
        case 1:
            return "(" + expr(depth - 1) + " - " + expr(depth - 1) + ")";
        case 2:
            return "(" + expr(depth - 1) + " * " + std::to_string(pick(0, 2)) + ")";
        case 3:
            return loops_ == 0 ? "(" + expr(depth - 1) + ")^2" : "-" + expr(depth - 1);
        default:
            return "-" + expr(depth - 1);
        }
    }

    std::string cond() {
        static const char* ops[] = {"=", "<>", "<", "<=", ">", ">="};
        std::string c = expr(1) + " " + ops[pick(0, 5)] + " " + expr(1);
        if (pick(0, 3) == 0) c = "not (" + c + ")";
        return c;
    }

    std::string block(int depth) {
        std::string v = name();
        std::string init;
        if (loops_ == 0 && randoms_ < 2 && pick(0, 3) == 0) {
            ++randoms_;
            init = "?";
        } else {
            init = expr(1);
        }
        std::string out = "begin int " + v + " := " + init + ";\n";
        scope_.push_back(v);
        out += statements(depth);
        scope_.pop_back();
        return out + "\nend";
    }

    std::string statements(int depth) {
        int n = pick(1, 4);
        std::string out;
        for (int i = 0; i < n; ++i) {
            if (i) out += ";\n";
            out += statement(depth);
        }
        return out;
    }

    std::string statement(int depth) {
        int k = pick(0, depth > 0 ? 7 : 3);
        switch (k) {
        case 0:
        case 1:
            return var() + " := " + expr(2);
        case 2:
            return "print " + expr(2);
        case 3:
            if (loops_ == 0 && randoms_ < 2) {
                ++randoms_;
                return var() + " := ?";
            }
            return "skip";
        case 4:
        case 5:
            return block(depth - 1);
        case 6:
            return "if " + cond() + " then " + statements(depth - 1) + " else " + statements(depth - 1) + " fi";
        default: {
            // Counted loop over a fresh block variable.
            std::string c = name();
            ++loops_;
            std::string body = statements(depth - 1);
            --loops_;
            return "begin int " + c + " := " + std::to_string(pick(0, 3)) + ";\nwhile " + c + " > 0 do " + body +
                   "; " + c + " := " + c + " - 1 od\nend";
        }
        }
    }

    std::mt19937 rng_;
    std::vector<std::string> scope_;
    int randoms_ = 0;
    int fresh_ = 0;
    int loops_ = 0;
};

}  // namespace dynsem::testing
