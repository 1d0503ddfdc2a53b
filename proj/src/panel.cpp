#include "surrokit/panel.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <string_view>
#include <unordered_map>

#include "surrokit/error.hpp"
#include "surrokit/numeric_format.hpp"

namespace surrokit {

namespace {

constexpr std::string_view kColumns[] = {"experiment_id", "user_id", "arm",
                                         "is_control",    "day",     "outcome"};
constexpr std::size_t kNumColumns = std::size(kColumns);

std::string line_context(std::size_t line_no) {
  return "line " + std::to_string(line_no);
}

// Splits `line` on `delim` into exactly kNumColumns fields.
bool split_fields(std::string_view line, char delim,
                  std::string_view (&fields)[kNumColumns]) {
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (n == kNumColumns) return false;
    if (pos == std::string_view::npos) {
      fields[n++] = line.substr(start);
      break;
    }
    fields[n++] = line.substr(start, pos - start);
    start = pos + 1;
  }
  return n == kNumColumns;
}

struct PendingUser {
  std::string id;
  ArmLabel arm;
  std::vector<std::pair<int, double>> cells;
};

}  // namespace

// ---------------------------------------------------------------------------
// DayRange

DayRange::DayRange(int first, int last) : first_(first), last_(last) {
  if (first > last) {
    throw Error(ErrorCode::InvalidArgument,
                "day range [" + std::to_string(first) + ", " +
                    std::to_string(last) + "] is empty");
  }
  if (first == 0 || last == 0) {
    throw Error(ErrorCode::InvalidArgument, "day 0 cannot bound a day range");
  }
}

std::size_t DayRange::size() const {
  if (first_ > last_) return 0;
  std::size_t n = static_cast<std::size_t>(last_ - first_ + 1);
  return (first_ < 0 && last_ > 0) ? n - 1 : n;
}

bool DayRange::contains(int day) const {
  return day != 0 && day >= first_ && day <= last_;
}

bool DayRange::contains(int from_day, int to_day) const {
  return from_day <= to_day && contains(from_day) && contains(to_day);
}

std::size_t DayRange::column(int day) const {
  std::size_t col = static_cast<std::size_t>(day - first_);
  return (first_ < 0 && day > 0) ? col - 1 : col;
}

int DayRange::day_at(std::size_t column) const {
  int day = first_ + static_cast<int>(column);
  return (first_ < 0 && day >= 0) ? day + 1 : day;
}

// ---------------------------------------------------------------------------
// UserRecord / OutcomePanel

UserRecord::UserRecord(std::string user_id, ArmLabel arm, std::vector<double> outcomes)
    : user_id_(std::move(user_id)), arm_(std::move(arm)), outcomes_(std::move(outcomes)) {}

OutcomePanel::OutcomePanel(std::string experiment_id, DayRange days,
                           std::vector<UserRecord> users, int horizon)
    : experiment_id_(std::move(experiment_id)),
      days_(days),
      users_(std::move(users)),
      horizon_(horizon) {
  if (horizon_ <= 0) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  }
  const std::size_t width = days_.size();
  std::vector<ArmLabel> treatments;
  std::optional<ArmLabel> control;
  for (const auto& user : users_) {
    if (user.outcomes().size() != width) {
      throw Error(ErrorCode::MissingDay,
                  "user " + user.user_id() + " has " +
                      std::to_string(user.outcomes().size()) + " days, panel declares " +
                      std::to_string(width));
    }
    for (std::size_t k = 0; k < width; ++k) {
      if (!std::isfinite(user.outcomes()[k])) {
        throw Error(ErrorCode::NonFiniteOutcome,
                    "user " + user.user_id() + " day " + std::to_string(days_.day_at(k)));
      }
    }
    const ArmLabel& arm = user.arm();
    if (arm.is_control) {
      if (!control) {
        control = arm;
      } else if (control->name != arm.name) {
        throw Error(ErrorCode::MultipleControlArms,
                    "both '" + control->name + "' and '" + arm.name + "' are control");
      }
      continue;
    }
    if (control && control->name == arm.name) {
      throw Error(ErrorCode::MalformedRow,
                  "arm '" + arm.name + "' is labelled both control and treatment");
    }
    bool seen = false;
    for (const auto& t : treatments) seen = seen || t.name == arm.name;
    if (!seen) treatments.push_back(arm);
  }
  if (!control) {
    throw Error(ErrorCode::NoControlArm, "experiment " + experiment_id_);
  }
  for (const auto& t : treatments) {
    if (t.name == control->name) {
      throw Error(ErrorCode::MalformedRow,
                  "arm '" + t.name + "' is labelled both control and treatment");
    }
  }
  if (treatments.empty()) {
    throw Error(ErrorCode::NoTreatmentArm, "experiment " + experiment_id_);
  }
  arms_.reserve(treatments.size() + 1);
  arms_.push_back(*control);
  arms_.insert(arms_.end(), treatments.begin(), treatments.end());
}

double OutcomePanel::outcome(std::size_t user, int day) const {
  if (!days_.contains(day)) {
    throw Error(ErrorCode::OutOfRange, "day " + std::to_string(day));
  }
  return users_.at(user).outcomes()[days_.column(day)];
}

std::span<const ArmLabel> OutcomePanel::treatment_arms() const {
  return std::span<const ArmLabel>(arms_).subspan(1);
}

std::optional<ArmLabel> OutcomePanel::find_arm(const std::string& name) const {
  for (const auto& arm : arms_) {
    if (arm.name == name) return arm;
  }
  return std::nullopt;
}

std::vector<std::size_t> OutcomePanel::users_in_arm(const std::string& name) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < users_.size(); ++i) {
    if (users_[i].arm().name == name) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

OutcomePanel load_panel(std::istream& source, const PanelSchema& schema) {
  std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  if (source.bad()) throw Error(ErrorCode::Io, "failed reading panel stream");

  std::string_view rest(text);
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (rest.empty()) return false;
    std::size_t pos = rest.find('\n');
    line = rest.substr(0, pos);
    rest = pos == std::string_view::npos ? std::string_view{} : rest.substr(pos + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    return true;
  };

  std::string_view fields[kNumColumns];
  std::string_view line;
  if (!next_line(line)) throw Error(ErrorCode::EmptyInput, "panel has no header row");
  if (line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
  if (!split_fields(line, schema.delimiter, fields)) {
    throw Error(ErrorCode::MalformedRow, "header must have exactly 6 columns");
  }
  for (std::size_t c = 0; c < kNumColumns; ++c) {
    if (fields[c] != kColumns[c]) {
      throw Error(ErrorCode::MalformedRow,
                  "header column " + std::to_string(c + 1) + " must be '" +
                      std::string(kColumns[c]) + "', got '" + std::string(fields[c]) + "'");
    }
  }

  std::optional<std::string> experiment_id;
  std::vector<PendingUser> pending;
  std::unordered_map<std::string, std::size_t> user_index;
  std::unordered_map<std::string, bool> arm_control;
  int min_day = 0;
  int max_day = 0;
  bool any = false;

  while (next_line(line)) {
    if (line.empty()) continue;
    if (!split_fields(line, schema.delimiter, fields)) {
      throw Error(ErrorCode::MalformedRow, line_context(line_no) + ": expected 6 fields");
    }
    if (!experiment_id) {
      experiment_id = std::string(fields[0]);
    } else if (*experiment_id != fields[0]) {
      throw Error(ErrorCode::MalformedRow,
                  line_context(line_no) + ": mixed experiment ids '" + *experiment_id +
                      "' and '" + std::string(fields[0]) + "'");
    }
    if (fields[1].empty() || fields[2].empty()) {
      throw Error(ErrorCode::MalformedRow, line_context(line_no) + ": empty user or arm");
    }
    bool is_control;
    if (fields[3] == "true") {
      is_control = true;
    } else if (fields[3] == "false") {
      is_control = false;
    } else {
      throw Error(ErrorCode::MalformedRow,
                  line_context(line_no) + ": is_control must be true or false");
    }
    auto day = parse_int(fields[4]);
    if (!day || *day == 0 || *day < -1000000 || *day > 1000000) {
      throw Error(ErrorCode::MalformedRow,
                  line_context(line_no) + ": bad day '" + std::string(fields[4]) + "'");
    }
    auto value = parse_double(fields[5]);
    if (!value) {
      throw Error(ErrorCode::MalformedRow,
                  line_context(line_no) + ": bad outcome '" + std::string(fields[5]) + "'");
    }
    if (!std::isfinite(*value)) {
      throw Error(ErrorCode::NonFiniteOutcome, line_context(line_no));
    }

    std::string arm_name(fields[2]);
    auto [arm_it, arm_new] = arm_control.emplace(arm_name, is_control);
    if (!arm_new && arm_it->second != is_control) {
      throw Error(ErrorCode::MalformedRow,
                  line_context(line_no) + ": arm '" + arm_name + "' changes is_control");
    }

    std::string user_id(fields[1]);
    auto [it, inserted] = user_index.emplace(user_id, pending.size());
    if (inserted) {
      pending.push_back(PendingUser{std::move(user_id), ArmLabel{arm_name, is_control}, {}});
    } else if (pending[it->second].arm.name != arm_name) {
      throw Error(ErrorCode::MalformedRow,
                  line_context(line_no) + ": user '" + it->first + "' switches arm");
    }
    int d = static_cast<int>(*day);
    pending[it->second].cells.emplace_back(d, *value);
    if (!any) {
      min_day = max_day = d;
      any = true;
    } else {
      min_day = std::min(min_day, d);
      max_day = std::max(max_day, d);
    }
  }
  if (!any) throw Error(ErrorCode::EmptyInput, "panel has no data rows");

  DayRange days(min_day, max_day);
  const std::size_t width = days.size();
  std::vector<UserRecord> users;
  users.reserve(pending.size());
  std::vector<char> seen(width);
  for (auto& p : pending) {
    std::vector<double> outcomes(width, 0.0);
    std::fill(seen.begin(), seen.end(), 0);
    for (auto [d, v] : p.cells) {
      std::size_t col = days.column(d);
      if (seen[col]) {
        throw Error(ErrorCode::DuplicateObservation,
                    "user '" + p.id + "' day " + std::to_string(d));
      }
      seen[col] = 1;
      outcomes[col] = v;
    }
    for (std::size_t col = 0; col < width; ++col) {
      if (!seen[col]) {
        throw Error(ErrorCode::MissingDay,
                    "user '" + p.id + "' lacks day " + std::to_string(days.day_at(col)));
      }
    }
    p.cells = {};
    users.emplace_back(std::move(p.id), std::move(p.arm), std::move(outcomes));
  }
  return OutcomePanel(*experiment_id, days, std::move(users), schema.horizon);
}

OutcomePanel load_panel_file(const std::filesystem::path& path, const PanelSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return load_panel(in, schema);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_panel(const OutcomePanel& panel, std::ostream& sink, const PanelSchema& schema) {
  const char d = schema.delimiter;
  std::string buf;
  for (std::size_t c = 0; c < kNumColumns; ++c) {
    if (c) buf += d;
    buf += kColumns[c];
  }
  buf += '\n';
  const auto& days = panel.day_range();
  for (const auto& user : panel.users()) {
    std::string prefix = panel.experiment_id();
    prefix += d;
    prefix += user.user_id();
    prefix += d;
    prefix += user.arm().name;
    prefix += d;
    prefix += user.arm().is_control ? "true" : "false";
    prefix += d;
    auto values = user.outcomes();
    for (std::size_t k = 0; k < values.size(); ++k) {
      buf += prefix;
      buf += std::to_string(days.day_at(k));
      buf += d;
      append_double(buf, values[k]);
      buf += '\n';
    }
    if (buf.size() > (1u << 20)) {
      sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!sink) throw Error(ErrorCode::Io, "failed writing panel");
}

// ---------------------------------------------------------------------------
// Windows and means

PanelWindow::PanelWindow(const OutcomePanel& panel, int from_day, int to_day)
    : panel_(&panel), from_day_(from_day), to_day_(to_day) {
  if (!panel.day_range().contains(from_day, to_day)) {
    throw Error(ErrorCode::OutOfRange,
                "window [" + std::to_string(from_day) + ", " + std::to_string(to_day) +
                    "] outside panel days [" + std::to_string(panel.day_range().first()) +
                    ", " + std::to_string(panel.day_range().last()) + "]");
  }
  first_col_ = panel.day_range().column(from_day);
  width_ = panel.day_range().column(to_day) - first_col_ + 1;
}

std::span<const double> PanelWindow::row(std::size_t user) const {
  return panel_->users()[user].outcomes().subspan(first_col_, width_);
}

Eigen::MatrixXd PanelWindow::to_matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
  for (std::size_t i = 0; i < rows(); ++i) {
    auto r = row(i);
    for (std::size_t j = 0; j < width_; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[j];
    }
  }
  return m;
}

PanelWindow window(const OutcomePanel& panel, int from_day, int to_day) {
  return PanelWindow(panel, from_day, to_day);
}

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double long_term_mean(const OutcomePanel& panel, const UserRecord& user) {
  const auto& days = panel.day_range();
  if (!days.contains(1, panel.horizon())) {
    throw Error(ErrorCode::MissingDay, "panel " + panel.experiment_id() +
                                           " lacks days 1.." + std::to_string(panel.horizon()));
  }
  return mean_of(user.outcomes().subspan(days.column(1),
                                         static_cast<std::size_t>(panel.horizon())));
}

double long_term_mean(const OutcomePanel& panel, std::size_t user) {
  return long_term_mean(panel, panel.users().at(user));
}

}  // namespace surrokit
