#ifndef SMC_REPORT_HPP
#define SMC_REPORT_HPP

#include <string>

#include "smc/config.hpp"
#include "smc/runtime.hpp"

namespace smc {

inline constexpr const char* kRunCsvHeader =
    "run_id,mode,seed,workers,tasks,grain,status,makespan,retransmissions,result_digest";

std::string run_csv_row(const std::string& run_id, const RunConfig& cfg,
                        std::int64_t tasks, std::int64_t grain, const RunReport& report);

// Whole-file replace via write-to-temp + rename; no partial output on error.
void atomic_write_file(const std::string& path, const std::string& content);

// Appends a row, creating the file with `header` first; the updated file
// replaces the old one atomically.
void atomic_append_csv(const std::string& path, const std::string& header,
                       const std::string& row);

}  // namespace smc

#endif
