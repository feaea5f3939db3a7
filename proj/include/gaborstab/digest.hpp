#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace gaborstab {

// 64-bit FNV-1a, used for reproducible input fingerprints.
class Digest {
 public:
  Digest& add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
    h_ ^= 0xff;  // field separator
    h_ *= 0x100000001b3ULL;
    return *this;
  }
  Digest& add(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return add(std::string_view(buf));
  }
  Digest& add(long long v) { return add(std::to_string(v)); }
  Digest& add(std::uint64_t v) { return add(std::to_string(v)); }
  Digest& add(int v) { return add(static_cast<long long>(v)); }

  std::uint64_t value() const { return h_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace gaborstab
