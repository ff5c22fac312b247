#include "smc/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smc {

std::string run_csv_row(const std::string& run_id, const RunConfig& cfg,
                        std::int64_t tasks, std::int64_t grain, const RunReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%llu,%zu,%lld,%lld,%s,%.6f,%lld,%s",
                run_id.c_str(), grain_mode_name(cfg.grain_mode),
                static_cast<unsigned long long>(cfg.run_seed), cfg.workers.size(),
                static_cast<long long>(tasks), static_cast<long long>(grain),
                run_status_name(report.status), to_config_ticks(report.makespan),
                static_cast<long long>(report.retransmissions),
                digest_hex(report.result_digest).c_str());
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

void atomic_append_csv(const std::string& path, const std::string& header,
                       const std::string& row) {
  std::string content;
  {
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::ostringstream ss;
      ss << in.rdbuf();
      content = ss.str();
    }
  }
  if (content.empty()) content = header + "\n";
  content += row + "\n";
  atomic_write_file(path, content);
}

}  // namespace smc
