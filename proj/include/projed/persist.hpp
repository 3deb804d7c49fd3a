#pragma once

// XML save/load of terms and sessions, and reading language files from disk.
//
// Output is canonical: UTF-8, LF, two-space indent, attributes always in the
// order listed below, so saving the same value twice gives the same bytes.
//
//   <term functor="f" id="p1,p2">...</term>
//   <str v=""/> <int v=""/> <bool v="#t"/> <char v=""/>
//   <hole id="" kind="choice|repeat|text" clause="name/0/1" text="" shown="#t"/>
//
// Identity parts: ints in decimal, #t/#f, #\c for characters, strings with
// '%' and ',' percent-escaped and a leading ' when they would otherwise read
// as one of the other kinds.

#include <filesystem>
#include <memory>
#include <string>

#include "projed/langdef.hpp"
#include "projed/session.hpp"

namespace projed {

class PersistError : public Error {
 public:
  using Error::Error;
};

// Unreadable or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kSessionFormatVersion = 1;

std::string encode_identity(const Identity& id);
Identity decode_identity(std::string_view text);

std::string save_term(const Term& t);
// Advances the fresh-identity counter past every integer identity part.
Term load_term(std::string_view xml);

std::string save_session(const Session& s);
// The language must be the one the session was saved with (matched by name).
// Layout entries for nodes that are gone are dropped.
Session load_session(std::string_view xml, std::shared_ptr<const LanguageDef> def,
                     SessionOptions options = {});

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
LanguageDef load_language_file(const std::filesystem::path& path);

}  // namespace projed
