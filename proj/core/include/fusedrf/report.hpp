#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fusedrf {

/// One optimizer iteration: phase name, loss, samples that carried gradient, elapsed wall time.
struct IterationRecord {
    std::string phase;
    int iteration = 0;
    double loss = 0.0;
    std::size_t samples = 0;
    double wall_ms = 0.0;
};

/**
 * Training log plus summary key/values. Serialized as text:
 *
 *   # fusedrf training report
 *   iter phase=<name> iteration=<i> loss=<x> samples=<n> wall_ms=<t>
 *   ...
 *   summary <key>=<value>
 *   ...
 *
 * `wall_ms` on iteration lines is cumulative time within the phase. Summary lines carry
 * phase durations, final losses/PSNRs and the full effective configuration (keys
 * prefixed with `config.`).
 */
struct TrainingReport {
    std::vector<IterationRecord> iterations;
    std::vector<std::pair<std::string, std::string>> summary;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    /// Empty string when absent.
    [[nodiscard]] std::string get(const std::string& key) const;
};

void write_report(std::ostream& out, const TrainingReport& report);
TrainingReport read_report(std::istream& in);

}  // namespace fusedrf
