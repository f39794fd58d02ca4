#include "fusedrf/report.hpp"

#include "fusedrf/errors.hpp"
#include "fusedrf/text_format.hpp"

#include <istream>
#include <map>
#include <ostream>

namespace fusedrf {

void TrainingReport::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : summary) {
        if (k == key) {
            v = value;
            return;
        }
    }
    summary.emplace_back(key, value);
}

void TrainingReport::set(const std::string& key, double value) { set(key, text::format_double(value)); }

std::string TrainingReport::get(const std::string& key) const {
    for (const auto& [k, v] : summary) {
        if (k == key) {
            return v;
        }
    }
    return {};
}

void write_report(std::ostream& out, const TrainingReport& report) {
    out << "# fusedrf training report\n";
    for (const auto& r : report.iterations) {
        out << "iter phase=" << r.phase << " iteration=" << r.iteration
            << " loss=" << text::format_double(r.loss) << " samples=" << r.samples
            << " wall_ms=" << text::format_double(r.wall_ms) << "\n";
    }
    for (const auto& [k, v] : report.summary) {
        out << "summary " << k << "=" << v << "\n";
    }
}

TrainingReport read_report(std::istream& in) {
    const std::string source = "<report>";
    TrainingReport report;
    for (const auto& line : text::tokenize(in)) {
        const std::string& kind = line.tokens.front();
        std::map<std::string, std::string> kv;
        for (std::size_t i = 1; i < line.tokens.size(); ++i) {
            const auto eq = line.tokens[i].find('=');
            if (eq == std::string::npos) {
                throw ParseError(source, line.number, "expected key=value, got '" + line.tokens[i] + "'");
            }
            kv[line.tokens[i].substr(0, eq)] = line.tokens[i].substr(eq + 1);
        }
        if (kind == "iter") {
            try {
                IterationRecord r;
                r.phase = kv.at("phase");
                r.iteration = std::stoi(kv.at("iteration"));
                r.loss = std::stod(kv.at("loss"));
                r.samples = std::stoull(kv.at("samples"));
                r.wall_ms = std::stod(kv.at("wall_ms"));
                report.iterations.push_back(r);
            } catch (const std::exception&) {
                throw ParseError(source, line.number, "malformed iter record");
            }
        } else if (kind == "summary") {
            for (const auto& [k, v] : kv) {
                report.summary.emplace_back(k, v);
            }
        } else {
            throw ParseError(source, line.number, "unknown record '" + kind + "'");
        }
    }
    return report;
}

}  // namespace fusedrf
