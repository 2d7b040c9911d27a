#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boolmf/binmat.hpp"

namespace boolmf {

struct Rating {
  std::int64_t user = 0;
  std::int64_t movie = 0;
  double rating = 0.0;
  std::int64_t timestamp = 0;
};

/// Only records inside the window are kept while parsing; the full 25M file
/// never has to sit in memory.
struct IdWindow {
  std::int64_t user_max = std::numeric_limits<std::int64_t>::max();
  std::int64_t movie_max = std::numeric_limits<std::int64_t>::max();
};

/// Ratings on the 0.5..5.0 half-star grid, unique per (user, movie).
class RatingsTable {
 public:
  RatingsTable() = default;
  explicit RatingsTable(std::vector<Rating> records);

  /// Parses "userId,movieId,rating,timestamp" with a header line.
  static RatingsTable read_csv(std::istream& in, IdWindow window = {});
  static RatingsTable load_csv(const std::filesystem::path& path, IdWindow window = {});

  std::span<const Rating> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

 private:
  std::vector<Rating> records_;
};

bool on_rating_grid(double rating) noexcept;

/// movieId -> genre tags.
class GenreTable {
 public:
  /// Parses "movieId,title,genres" with a header line; genres are '|'-separated.
  static GenreTable read_csv(std::istream& in);
  static GenreTable load_csv(const std::filesystem::path& path);

  void add(std::int64_t movie, std::vector<std::string> tags);
  const std::vector<std::string>* find(std::int64_t movie) const;
  std::size_t size() const noexcept { return tags_.size(); }

 private:
  std::map<std::int64_t, std::vector<std::string>> tags_;
};

enum class FilterKind : std::uint8_t {
  FixedPoint,  // repeat row pass then column pass until nothing changes
  OnePass      // a single row pass followed by a single column pass
};

struct IngestConfig {
  std::int64_t user_id_max = 300;
  std::int64_t movie_id_max = 400;
  double rating_threshold = 1.0;
  std::size_t min_ones = 20;
  FilterKind filter = FilterKind::FixedPoint;

  void validate() const;
  IdWindow window() const noexcept { return {user_id_max, movie_id_max}; }
};

struct IngestResult {
  BinaryMatrix v;
  std::vector<std::int64_t> row_users;   // row index -> userId, strictly increasing
  std::vector<std::int64_t> col_movies;  // column index -> movieId, strictly increasing
};

/// Users as rows, movies as columns; 1 where a rating >= threshold exists.
/// Rows and columns with fewer than min_ones ones are then removed.
IngestResult build_matrix(const RatingsTable& ratings, const IngestConfig& config);

/// Rows within `radius` of `anchor` (anchor included), ascending.
std::vector<std::size_t> group_members(const IntMatrix& distances, std::size_t anchor, std::int32_t radius);

struct ColumnSupport {
  std::size_t column = 0;
  bool all_ones = false;     // every listed row has a 1
  bool all_zeros = false;    // every listed row has a 0
  double density = 0.0;      // fraction of ones over all rows
};

std::vector<ColumnSupport> column_support(const BinaryMatrix& v, std::span<const std::size_t> rows);

/// Columns: movieId,genres,all_ones_flag,column_density,all_zeros_flag (genres '|'-joined).
void write_support_csv(std::ostream& out, std::span<const ColumnSupport> support,
                       std::span<const std::int64_t> col_movies, const GenreTable* genres);

/// "index,<header>" then one line per position.
void write_id_map(std::ostream& out, const char* header, std::span<const std::int64_t> ids);

}  // namespace boolmf
