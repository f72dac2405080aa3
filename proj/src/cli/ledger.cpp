#include "pompif/cli/ledger.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <system_error>

#include "pompif/cli/csv_io.hpp"
#include "pompif/errors.hpp"

namespace pompif::cli {

namespace {

constexpr const char* kHeader =
    "timestamp,workflow,model,params,loglik,loglik_se,particles,replicates,seed\n";

// flock is per open file description, so threads of one process also need this.
std::mutex ledger_mutex;

std::system_error sys_error(const std::filesystem::path& path) {
  return {errno, std::generic_category(), "ledger " + path.string()};
}

void write_all(int fd, const std::string& s, const std::filesystem::path& path) {
  const char* p = s.data();
  std::size_t left = s.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw sys_error(path);
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ledger_append(const LedgerRecord& r, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ostringstream row;
  // params contains no commas ("a=1;b=2")
  row << r.timestamp << ',' << r.workflow << ',' << r.model << ',' << r.params << ','
      << format_double(r.loglik) << ',' << format_double(r.loglik_se) << ',' << r.particles
      << ',' << r.replicates << ',' << r.seed << '\n';

  std::lock_guard guard(ledger_mutex);
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw sys_error(path);
  struct Closer {
    int fd;
    ~Closer() { ::close(fd); }
  } closer{fd};
  while (::flock(fd, LOCK_EX) != 0) {
    if (errno != EINTR) throw sys_error(path);
  }
  struct stat st{};
  if (::fstat(fd, &st) != 0) throw sys_error(path);
  std::string text = st.st_size == 0 ? std::string(kHeader) : std::string();
  text += row.str();
  write_all(fd, text, path);
  ::flock(fd, LOCK_UN);
}

std::vector<LedgerRecord> read_ledger(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ledger '" + path.string() + "'");
  std::vector<LedgerRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw DataError("expected 9 ledger fields", lineno);
    try {
      LedgerRecord r;
      r.timestamp = f[0];
      r.workflow = f[1];
      r.model = f[2];
      r.params = f[3];
      r.loglik = f[4].empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(f[4]);
      r.loglik_se = f[5].empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(f[5]);
      r.particles = std::stoull(f[6]);
      r.replicates = std::stoull(f[7]);
      r.seed = std::stoull(f[8]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw DataError("malformed ledger row", lineno);
    }
  }
  return out;
}

}  // namespace pompif::cli
