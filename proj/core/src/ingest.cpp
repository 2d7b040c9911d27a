#include "boolmf/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <tuple>
#include <utility>

#include "number_format.hpp"

namespace boolmf {

namespace {

// RFC 4180 style split: quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw std::runtime_error("csv: unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line_no, const char* what) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error("csv line " + std::to_string(line_no) + ": bad " + what + " '" + std::string(text) + "'");
  }
  return value;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

bool on_rating_grid(double rating) noexcept {
  if (!(rating >= 0.5 && rating <= 5.0)) return false;
  const double doubled = rating * 2.0;
  return doubled == std::round(doubled);
}

RatingsTable::RatingsTable(std::vector<Rating> records) : records_(std::move(records)) {
  for (const auto& r : records_) {
    if (!on_rating_grid(r.rating)) {
      throw std::invalid_argument("RatingsTable: rating " + std::to_string(r.rating) + " is off the 0.5..5.0 grid");
    }
  }
  std::sort(records_.begin(), records_.end(),
            [](const Rating& a, const Rating& b) { return std::tie(a.user, a.movie) < std::tie(b.user, b.movie); });
  auto dup = std::adjacent_find(records_.begin(), records_.end(), [](const Rating& a, const Rating& b) {
    return a.user == b.user && a.movie == b.movie;
  });
  if (dup != records_.end()) {
    throw std::invalid_argument("RatingsTable: duplicate rating for user " + std::to_string(dup->user) + ", movie " +
                                std::to_string(dup->movie));
  }
}

RatingsTable RatingsTable::read_csv(std::istream& in, IdWindow window) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ratings csv: empty input");
  std::vector<Rating> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw std::runtime_error("ratings csv line " + std::to_string(line_no) + ": expected 4 fields");
    }
    Rating r;
    r.user = parse_number<std::int64_t>(fields[0], line_no, "userId");
    r.movie = parse_number<std::int64_t>(fields[1], line_no, "movieId");
    if (r.user > window.user_max || r.movie > window.movie_max) continue;
    r.rating = parse_number<double>(fields[2], line_no, "rating");
    r.timestamp = parse_number<std::int64_t>(fields[3], line_no, "timestamp");
    records.push_back(r);
  }
  return RatingsTable(std::move(records));
}

RatingsTable RatingsTable::load_csv(const std::filesystem::path& path, IdWindow window) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ratings file " + path.string());
  return read_csv(in, window);
}

GenreTable GenreTable::read_csv(std::istream& in) {
  GenreTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("movies csv: empty input");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw std::runtime_error("movies csv line " + std::to_string(line_no) + ": expected 3 fields");
    }
    std::vector<std::string> tags;
    std::string_view rest = fields[2];
    while (!rest.empty()) {
      const auto bar = rest.find('|');
      tags.emplace_back(rest.substr(0, bar));
      if (bar == std::string_view::npos) break;
      rest.remove_prefix(bar + 1);
    }
    table.add(parse_number<std::int64_t>(fields[0], line_no, "movieId"), std::move(tags));
  }
  return table;
}

GenreTable GenreTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open movies file " + path.string());
  return read_csv(in);
}

void GenreTable::add(std::int64_t movie, std::vector<std::string> tags) {
  if (tags.empty()) throw std::invalid_argument("GenreTable: movie " + std::to_string(movie) + " has no genres");
  tags_[movie] = std::move(tags);
}

const std::vector<std::string>* GenreTable::find(std::int64_t movie) const {
  auto it = tags_.find(movie);
  return it == tags_.end() ? nullptr : &it->second;
}

void IngestConfig::validate() const {
  if (user_id_max < 1 || movie_id_max < 1) throw std::invalid_argument("IngestConfig: ID bounds must be positive");
  if (!on_rating_grid(rating_threshold)) {
    throw std::invalid_argument("IngestConfig: threshold must be on the 0.5..5.0 rating grid");
  }
}

IngestResult build_matrix(const RatingsTable& ratings, const IngestConfig& config) {
  config.validate();
  std::vector<std::int64_t> users;
  std::vector<std::int64_t> movies;
  for (const auto& r : ratings.records()) {
    if (r.user < 1 || r.movie < 1 || r.user > config.user_id_max || r.movie > config.movie_id_max) continue;
    users.push_back(r.user);
    movies.push_back(r.movie);
  }
  auto uniq = [](std::vector<std::int64_t>& ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  };
  uniq(users);
  uniq(movies);
  auto index_of = [](const std::vector<std::int64_t>& ids, std::int64_t id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  const std::size_t m = users.size();
  const std::size_t n = movies.size();
  std::vector<std::uint8_t> cells(m * n, 0);
  for (const auto& r : ratings.records()) {
    if (r.user < 1 || r.movie < 1 || r.user > config.user_id_max || r.movie > config.movie_id_max) continue;
    if (r.rating >= config.rating_threshold) cells[index_of(users, r.user) * n + index_of(movies, r.movie)] = 1;
  }

  std::vector<bool> keep_row(m, true);
  std::vector<bool> keep_col(n, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (!keep_row[i]) continue;
      std::size_t ones = 0;
      for (std::size_t j = 0; j < n; ++j) ones += keep_col[j] && cells[i * n + j];
      if (ones < config.min_ones) {
        keep_row[i] = false;
        changed = true;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!keep_col[j]) continue;
      std::size_t ones = 0;
      for (std::size_t i = 0; i < m; ++i) ones += keep_row[i] && cells[i * n + j];
      if (ones < config.min_ones) {
        keep_col[j] = false;
        changed = true;
      }
    }
    if (config.filter == FilterKind::OnePass) break;
  }

  IngestResult out;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < m; ++i) {
    if (keep_row[i]) {
      rows.push_back(i);
      out.row_users.push_back(users[i]);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (keep_col[j]) {
      cols.push_back(j);
      out.col_movies.push_back(movies[j]);
    }
  }
  if (rows.empty() || cols.empty()) throw std::runtime_error("build_matrix: no rows or columns survive filtering");

  std::vector<std::uint8_t> bits;
  bits.reserve(rows.size() * cols.size());
  for (auto i : rows) {
    for (auto j : cols) bits.push_back(cells[i * n + j]);
  }
  out.v = BinaryMatrix(rows.size(), cols.size(), std::move(bits));
  return out;
}

std::vector<std::size_t> group_members(const IntMatrix& distances, std::size_t anchor, std::int32_t radius) {
  if (distances.rows() != distances.cols()) throw std::invalid_argument("group_members: distance matrix not square");
  if (anchor >= distances.rows()) throw std::out_of_range("group_members: anchor out of range");
  std::vector<std::size_t> members;
  for (std::size_t u = 0; u < distances.rows(); ++u) {
    if (u == anchor || distances(anchor, u) <= radius) members.push_back(u);
  }
  return members;
}

std::vector<ColumnSupport> column_support(const BinaryMatrix& v, std::span<const std::size_t> rows) {
  for (auto r : rows) {
    if (r >= v.rows()) throw std::out_of_range("column_support: row index out of range");
  }
  std::vector<ColumnSupport> out(v.cols());
  for (std::size_t j = 0; j < v.cols(); ++j) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < v.rows(); ++i) ones += v(i, j);
    bool all_ones = !rows.empty();
    bool all_zeros = !rows.empty();
    for (auto r : rows) {
      all_ones = all_ones && v(r, j) != 0;
      all_zeros = all_zeros && v(r, j) == 0;
    }
    out[j] = {j, all_ones, all_zeros, v.rows() == 0 ? 0.0 : static_cast<double>(ones) / static_cast<double>(v.rows())};
  }
  return out;
}

void write_support_csv(std::ostream& out, std::span<const ColumnSupport> support,
                       std::span<const std::int64_t> col_movies, const GenreTable* genres) {
  out << "movieId,genres,all_ones_flag,column_density,all_zeros_flag\n";
  for (const auto& s : support) {
    const std::int64_t movie = s.column < col_movies.size() ? col_movies[s.column] : static_cast<std::int64_t>(s.column);
    std::string tags;
    if (genres != nullptr) {
      if (const auto* t = genres->find(movie)) {
        for (std::size_t g = 0; g < t->size(); ++g) tags += (g ? "|" : "") + (*t)[g];
      }
    }
    out << movie << ',' << tags << ',' << (s.all_ones ? 1 : 0) << ',' << detail::format_number(s.density) << ',' << (s.all_zeros ? 1 : 0)
        << '\n';
  }
}

void write_id_map(std::ostream& out, const char* header, std::span<const std::int64_t> ids) {
  out << "index," << header << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) out << i << ',' << ids[i] << '\n';
}

}  // namespace boolmf
