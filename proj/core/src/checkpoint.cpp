#include "aoheom/checkpoint.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "aoheom/errors.hpp"

namespace aoheom {

namespace {

constexpr const char* kMagic = "aoheom-checkpoint";

std::string hex(double v) {
    std::ostringstream os;
    os << std::hexfloat << v;
    return os.str();
}

class Reader {
public:
    explicit Reader(std::istream& is) : is_(is) {}

    std::string word() {
        std::string w;
        if (!(is_ >> w)) throw ParseError("unexpected end of checkpoint", 0);
        return w;
    }
    void expect(const std::string& key) {
        const auto w = word();
        if (w != key) throw ParseError("checkpoint: expected '" + key + "', found '" + w + "'", 0);
    }
    double real() {
        const auto w = word();
        char* end = nullptr;
        const double v = std::strtod(w.c_str(), &end);
        if (end == w.c_str() || *end != '\0') throw ParseError("checkpoint: bad number " + w, 0);
        return v;
    }
    long integer() {
        const auto w = word();
        char* end = nullptr;
        const long v = std::strtol(w.c_str(), &end, 10);
        if (end == w.c_str() || *end != '\0') throw ParseError("checkpoint: bad integer " + w, 0);
        return v;
    }

private:
    std::istream& is_;
};

QuantumNumbers parse_label(const std::string& s) {
    QuantumNumbers q;
    char d1 = 0;
    char d2 = 0;
    std::istringstream is(s);
    if (!(is >> q.n >> d1 >> q.l >> d2 >> q.m) || d1 != '.' || d2 != '.') {
        throw ParseError("checkpoint: bad state label " + s, 0);
    }
    return q;
}

}  // namespace

CheckpointHeader CheckpointHeader::from_model(const ModelContext& model, double time) {
    CheckpointHeader h;
    h.states = model.basis.states();
    h.bath = model.bath;
    h.pade_K = model.space->per_axis_K();
    h.depth = model.space->depth();
    h.truncation = model.space->truncation();
    h.time = time;
    return h;
}

void write_checkpoint(std::ostream& os, const CheckpointHeader& header,
                      const HierarchyState& state) {
    os << kMagic << ' ' << header.version << '\n';
    os << "states " << header.states.size();
    for (const auto& q : header.states) os << ' ' << q.label();
    os << '\n';
    os << "beta " << hex(header.bath.beta) << '\n';
    for (Axis a : kAxes) {
        os << "bath " << axis_name(a) << ' ' << hex(header.bath[a].eta) << ' '
           << hex(header.bath[a].gamma) << '\n';
    }
    os << "pade_K " << header.pade_K[0] << ' ' << header.pade_K[1] << ' ' << header.pade_K[2]
       << '\n';
    os << "depth " << header.depth << '\n';
    os << "truncation " << (header.truncation == TruncationMode::global ? "global" : "per_bath")
       << '\n';
    os << "time " << hex(header.time) << '\n';
    os << "dimension " << state.dimension() << '\n';
    os << "ados " << state.ados.size() << '\n';
    for (std::size_t p = 0; p < state.ados.size(); ++p) {
        os << "ado " << p;
        for (int c : (*state.space)[p].counts) os << ' ' << c;
        os << '\n';
        const auto& m = state.ados[p];
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                os << (j ? " " : "") << hex(m(i, j).real()) << ' ' << hex(m(i, j).imag());
            }
            os << '\n';
        }
    }
    os << "end\n";
}

void write_checkpoint(const std::string& path, const CheckpointHeader& header,
                      const HierarchyState& state) {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("cannot open " + path + " for writing");
    write_checkpoint(os, header, state);
}

Checkpoint read_checkpoint(std::istream& is) {
    Reader r(is);
    Checkpoint cp;
    r.expect(kMagic);
    cp.header.version = static_cast<int>(r.integer());
    if (cp.header.version != kCheckpointVersion) {
        throw ParseError("unsupported checkpoint version " + std::to_string(cp.header.version), 0);
    }
    r.expect("states");
    const long n_states = r.integer();
    for (long i = 0; i < n_states; ++i) cp.header.states.push_back(parse_label(r.word()));
    r.expect("beta");
    cp.header.bath.beta = r.real();
    for (Axis a : kAxes) {
        r.expect("bath");
        if (parse_axis(r.word().at(0)) != a) throw ParseError("checkpoint: bath axes out of order", 0);
        cp.header.bath[a].eta = r.real();
        cp.header.bath[a].gamma = r.real();
    }
    r.expect("pade_K");
    for (int& k : cp.header.pade_K) k = static_cast<int>(r.integer());
    r.expect("depth");
    cp.header.depth = static_cast<int>(r.integer());
    r.expect("truncation");
    const auto trunc = r.word();
    if (trunc == "global") {
        cp.header.truncation = TruncationMode::global;
    } else if (trunc == "per_bath") {
        cp.header.truncation = TruncationMode::per_bath;
    } else {
        throw ParseError("checkpoint: unknown truncation " + trunc, 0);
    }
    r.expect("time");
    cp.header.time = r.real();
    r.expect("dimension");
    const long dim = r.integer();
    r.expect("ados");
    const long n_ados = r.integer();

    auto space = std::make_shared<const HierarchyIndexSpace>(HierarchyIndexSpace::enumerate(
        cp.header.pade_K, cp.header.depth, cp.header.truncation));
    if (static_cast<long>(space->size()) != n_ados || dim != n_states) {
        throw ParseError("checkpoint: header does not match the stored hierarchy", 0);
    }
    cp.state = HierarchyState::zeros(space, static_cast<std::size_t>(dim));
    cp.state.time = cp.header.time;
    for (long p = 0; p < n_ados; ++p) {
        r.expect("ado");
        if (r.integer() != p) throw ParseError("checkpoint: ADO records out of order", 0);
        for (int expected : (*space)[p].counts) {
            if (r.integer() != expected) throw ParseError("checkpoint: ADO label mismatch", 0);
        }
        auto& m = cp.state.ados[p];
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                const double re = r.real();
                const double im = r.real();
                m(i, j) = Complex(re, im);
            }
        }
    }
    r.expect("end");
    return cp;
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open checkpoint " + path);
    return read_checkpoint(is);
}

}  // namespace aoheom
