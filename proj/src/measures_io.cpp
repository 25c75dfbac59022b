#include "mfl/measures_io.hpp"

#include <istream>
#include <map>
#include <ostream>

#include "mfl/csv.hpp"
#include "mfl/errors.hpp"

namespace mfl {

void write_csv(std::ostream& os, const GridDensity& rho) {
    os << "GridDensity,left=" << csv::real(rho.left()) << ",right=" << csv::real(rho.right())
       << ",cells=" << rho.cells() << '\n';
    for (double m : rho.mass()) os << csv::real(m) << '\n';
}

void write_csv(std::ostream& os, const EmpiricalMeasure& mu) {
    os << "EmpiricalMeasure,n=" << mu.size() << '\n';
    for (double a : mu.atoms()) os << csv::real(a) << '\n';
}

Measure read_measure_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ArgumentError("measure csv: missing header");
    const auto fields = csv::split(line);
    std::map<std::string, std::string> params;
    for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto eq = fields[i].find('=');
        if (eq == std::string::npos) throw ArgumentError("measure csv: malformed header field '" + fields[i] + "'");
        params[fields[i].substr(0, eq)] = fields[i].substr(eq + 1);
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = params.find(key);
        if (it == params.end()) throw ArgumentError("measure csv: header lacks '" + key + "'");
        return it->second;
    };
    auto read_values = [&](std::size_t count) {
        std::vector<double> values;
        values.reserve(count);
        while (values.size() < count && std::getline(is, line)) {
            if (line.empty() || line == "\r") continue;
            values.push_back(csv::parse_real(line));
        }
        if (values.size() != count) throw ArgumentError("measure csv: fewer values than declared");
        return values;
    };

    if (fields[0] == "GridDensity") {
        const auto cells = static_cast<std::size_t>(std::stoull(need("cells")));
        const double left = csv::parse_real(need("left"));
        const double right = csv::parse_real(need("right"));
        return GridDensity(left, right, read_values(cells));
    }
    if (fields[0] == "EmpiricalMeasure") {
        const auto n = static_cast<std::size_t>(std::stoull(need("n")));
        return EmpiricalMeasure(read_values(n));
    }
    throw ArgumentError("measure csv: unknown type '" + fields[0] + "'");
}

}  // namespace mfl
