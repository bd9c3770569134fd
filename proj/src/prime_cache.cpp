#include "nuclear/prime_cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>

#include "nuclear/error.hpp"

namespace nuclear {

namespace {

void put_u64(std::ostream& out, u64 v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

bool get_u64(std::istream& in, u64& v) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) return false;
  v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return true;
}

class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) {
      if (fd_ >= 0) ::close(fd_);
      fail(ErrorKind::io, "cannot lock " + path.string() + ": " + std::strerror(errno));
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

PrimeTable truncate_to(PrimeTable table, u64 limit) {
  table.primes.resize(table.count_upto(limit));
  table.limit = limit;
  return table;
}

}  // namespace

void write_prime_cache(const std::filesystem::path& path, const PrimeTable& table) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open " + tmp.string() + " for writing");
    out.write(kPrimeCacheMagic, sizeof kPrimeCacheMagic);
    put_u64(out, table.limit);
    put_u64(out, table.primes.size());
    for (u64 p : table.primes) put_u64(out, p);
    out.flush();
    if (!out) fail(ErrorKind::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::io, "cannot rename cache into " + path.string());
  }
}

PrimeTable read_prime_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kPrimeCacheMagic, 8) != 0) {
    fail(ErrorKind::io, path.string() + ": bad magic, not a prime cache");
  }
  PrimeTable table;
  u64 count = 0;
  if (!get_u64(in, table.limit) || !get_u64(in, count)) {
    fail(ErrorKind::io, path.string() + ": truncated header");
  }
  table.primes.resize(count);
  for (u64 i = 0; i < count; ++i) {
    if (!get_u64(in, table.primes[i])) fail(ErrorKind::io, path.string() + ": truncated body");
  }
  if (!std::is_sorted(table.primes.begin(), table.primes.end()) ||
      (!table.primes.empty() && table.primes.back() > table.limit)) {
    fail(ErrorKind::io, path.string() + ": inconsistent prime list");
  }
  return table;
}

std::filesystem::path prime_cache_file(const std::filesystem::path& dir) {
  return dir / "primes.bin";
}

PrimeTable load_or_generate_primes(u64 limit,
                                   const std::optional<std::filesystem::path>& dir,
                                   const SieveBudget& budget) {
  if (!dir) return generate_primes(limit, budget);
  const auto file = prime_cache_file(*dir);
  std::error_code ec;
  if (std::filesystem::exists(file, ec)) {
    try {
      auto cached = read_prime_cache(file);
      if (cached.limit >= limit) return truncate_to(std::move(cached), limit);
    } catch (const Error&) {
      // unreadable cache: regenerate below
    }
  }
  std::filesystem::create_directories(*dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create cache directory " + dir->string());
  FileLock lock(*dir / "primes.lock");
  // Another writer may have finished while we waited for the lock.
  if (std::filesystem::exists(file, ec)) {
    try {
      auto cached = read_prime_cache(file);
      if (cached.limit >= limit) return truncate_to(std::move(cached), limit);
    } catch (const Error&) {
    }
  }
  auto table = generate_primes(limit, budget);
  write_prime_cache(file, table);
  return table;
}

}  // namespace nuclear
