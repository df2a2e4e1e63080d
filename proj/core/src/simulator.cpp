#include "parsplit/simulator.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "csv.hpp"
#include "parsplit/errors.hpp"

namespace parsplit {

namespace {

bool valid_share(double f) { return f > 0.0 && f <= 1.0; }

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void SplitPolicy::validate() const {
    std::visit(Overloaded{
                   [](const Fixed& p) {
                       if (!valid_share(p.f)) {
                           throw DomainError("fixed split policy share " + std::to_string(p.f) +
                                             " outside (0, 1]");
                       }
                   },
                   [](const Uniform& p) {
                       if (!(p.lo > 0.0 && p.lo < p.hi && p.hi <= 1.0)) {
                           throw DomainError("uniform split policy needs 0 < lo < hi <= 1");
                       }
                   },
                   [](const Cyclic& p) {
                       if (p.values.empty()) throw DomainError("cyclic split policy is empty");
                       for (double f : p.values) {
                           if (!valid_share(f)) {
                               throw DomainError("cyclic split policy share " +
                                                 std::to_string(f) + " outside (0, 1]");
                           }
                       }
                   },
               },
               kind_);
}

double SplitPolicy::next(std::size_t index, Rng& rng) const {
    return std::visit(Overloaded{
                          [](const Fixed& p) { return p.f; },
                          [&rng](const Uniform& p) {
                              std::uniform_real_distribution<double> dist(p.lo, p.hi);
                              return dist(rng);
                          },
                          [index](const Cyclic& p) { return p.values[index % p.values.size()]; },
                      },
                      kind_);
}

double sample_completion(double share, const UnitParams& u, Rng& rng) {
    if (!valid_share(share)) {
        std::ostringstream msg;
        msg << "sample_completion: share " << share << " outside (0, 1]";
        throw DomainError(msg.str());
    }
    u.validate();
    return sample_normal(rng, u.scaled_mean(share), u.scaled_sd(share));
}

std::vector<TraceRecord> generate_trace(std::size_t n, const SplitPolicy& policy,
                                        const UnitParams& u, Rng& rng, SimulationStats* stats,
                                        bool complement) {
    if (n < 1) throw DomainError("generate_trace: need at least one record");
    policy.validate();
    u.validate();
    std::vector<TraceRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = policy.next(i, rng);
        const double share = complement ? 1.0 - f : f;
        if (!valid_share(share)) {
            std::ostringstream msg;
            msg << "generate_trace: record " << i << " has share " << share << " outside (0, 1]";
            throw DomainError(msg.str());
        }
        const double t = sample_completion(share, u, rng);
        if (stats != nullptr && t < 0.0) ++stats->negative_draws;
        records.push_back({share, t});
    }
    return records;
}

void save_trace(std::span<const TraceRecord> records, std::ostream& out) {
    out << "f,t\n" << std::setprecision(17);
    for (const auto& r : records) out << r.f << ',' << r.t << '\n';
}

void save_trace(std::span<const TraceRecord> records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
    save_trace(records, out);
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

std::vector<TraceRecord> load_trace(std::istream& in) {
    std::vector<TraceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        if (!header_seen) {
            if (csv::trim(line) != "f,t") {
                throw InputError("line " + std::to_string(line_no) + ": expected header 'f,t'",
                                 line_no);
            }
            header_seen = true;
            continue;
        }
        const auto fields = csv::split(line);
        if (fields.size() != 2) {
            throw InputError("line " + std::to_string(line_no) + ": expected 2 fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        const double f = csv::parse<double>(fields[0], line_no, "f");
        const double t = csv::parse<double>(fields[1], line_no, "t");
        if (!valid_share(f)) {
            throw InputError("line " + std::to_string(line_no) + ": share " + std::string(csv::trim(fields[0])) +
                                 " outside (0, 1]",
                             line_no);
        }
        if (!std::isfinite(t)) {
            throw InputError("line " + std::to_string(line_no) + ": completion time not finite",
                             line_no);
        }
        records.push_back({f, t});
    }
    return records;
}

std::vector<TraceRecord> load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace '" + path.string() + "'");
    return load_trace(in);
}

}  // namespace parsplit
