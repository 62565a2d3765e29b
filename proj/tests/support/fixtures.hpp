#pragma once

#include <tnrisk/csv.hpp>

#include <atomic>
#include <filesystem>
#include <string>
#include <string_view>
#include <unistd.h>

namespace tnrisk::testing {

inline std::filesystem::path bundled_data_dir() { return TNRISK_TEST_DATA_DIR; }

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("tnrisk-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, std::string_view content) const {
    write_text_file(path_ / name, content);
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline constexpr std::string_view kCountryHeaderLine =
    "code,name,region,population,gdp_usd,sec_fraction,muslim_pop,sigma_n,sigma_r,sigma_s,sigma_o,is_oecd,"
    "is_target\n";

}  // namespace tnrisk::testing
