#pragma once

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

#include "lmbias/error.hpp"

namespace lmbias {

// Hex SHA-256 over a length-prefixed encoding of the fields, so the digest
// is identical on every platform for the same inputs.
class CacheKey {
public:
    static CacheKey from_fields(std::initializer_list<std::string_view> fields);
    static CacheKey from_hex(std::string hex);

    const std::string& hex() const { return hex_; }
    friend bool operator==(const CacheKey&, const CacheKey&) = default;

private:
    explicit CacheKey(std::string hex) : hex_(std::move(hex)) {}
    std::string hex_;
};

class CacheConflict : public Error {
public:
    using Error::Error;
};

// Raw model responses, one file per key. Files are created by hard-linking a
// fully written temporary, so readers never see partial entries and a second
// writer for the same key fails instead of replacing the first.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path root);

    std::optional<std::string> get(const CacheKey& key) const;

    // Storing the same payload twice is a no-op; a different payload throws
    // CacheConflict. I/O failures throw IoError.
    void put(const CacheKey& key, std::string_view raw_output);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path path_for(const CacheKey& key) const;

private:
    std::filesystem::path root_;
};

}  // namespace lmbias
