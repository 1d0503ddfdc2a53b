#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace surrokit {

inline constexpr int kDefaultHorizon = 63;

struct ArmLabel {
  std::string name;
  bool is_control = false;

  friend bool operator==(const ArmLabel&, const ArmLabel&) = default;
};

// Inclusive interval of allocation-relative day indices. Post-allocation days
// are positive, pre-allocation days negative; day 0 never exists.
class DayRange {
 public:
  DayRange() = default;
  DayRange(int first, int last);

  int first() const { return first_; }
  int last() const { return last_; }
  std::size_t size() const;
  bool contains(int day) const;
  bool contains(int from_day, int to_day) const;

  // Column of `day` in the dense per-user outcome vector.
  std::size_t column(int day) const;
  int day_at(std::size_t column) const;

  friend bool operator==(const DayRange&, const DayRange&) = default;

 private:
  int first_ = 1;
  int last_ = 0;
};

class UserRecord {
 public:
  // `outcomes[k]` is the value on day `DayRange::day_at(k)` of the owning panel.
  UserRecord(std::string user_id, ArmLabel arm, std::vector<double> outcomes);

  const std::string& user_id() const { return user_id_; }
  const ArmLabel& arm() const { return arm_; }
  std::span<const double> outcomes() const { return outcomes_; }

  friend bool operator==(const UserRecord&, const UserRecord&) = default;

 private:
  std::string user_id_;
  ArmLabel arm_;
  std::vector<double> outcomes_;
};

/// Complete per-user daily outcome grid for one experiment.
///
/// Construction validates every invariant (finite values, complete grid,
/// exactly one control label, at least one treatment label); an instance is
/// immutable afterwards and safe to share between threads.
class OutcomePanel {
 public:
  OutcomePanel(std::string experiment_id, DayRange days,
               std::vector<UserRecord> users, int horizon = kDefaultHorizon);

  const std::string& experiment_id() const { return experiment_id_; }
  const DayRange& day_range() const { return days_; }
  int horizon() const { return horizon_; }
  const std::vector<UserRecord>& users() const { return users_; }
  std::size_t size() const { return users_.size(); }

  double outcome(std::size_t user, int day) const;

  const ArmLabel& control_arm() const { return arms_.front(); }
  // Non-control arms in order of first appearance.
  std::span<const ArmLabel> treatment_arms() const;
  std::optional<ArmLabel> find_arm(const std::string& name) const;
  std::vector<std::size_t> users_in_arm(const std::string& name) const;

  friend bool operator==(const OutcomePanel& a, const OutcomePanel& b) {
    return a.experiment_id_ == b.experiment_id_ && a.days_ == b.days_ &&
           a.horizon_ == b.horizon_ && a.users_ == b.users_;
  }

 private:
  std::string experiment_id_;
  DayRange days_;
  std::vector<UserRecord> users_;
  int horizon_;
  std::vector<ArmLabel> arms_;  // control first
};

struct PanelSchema {
  int horizon = kDefaultHorizon;
  char delimiter = ',';
};

// Long-format rows: experiment_id,user_id,arm,is_control,day,outcome
OutcomePanel load_panel(std::istream& source, const PanelSchema& schema = {});
OutcomePanel load_panel_file(const std::filesystem::path& path,
                             const PanelSchema& schema = {});
void write_panel(const OutcomePanel& panel, std::ostream& sink,
                 const PanelSchema& schema = {});

/// Read-only view of the columns [from_day, to_day] of every user, ordered
/// like OutcomePanel::users().
class PanelWindow {
 public:
  PanelWindow(const OutcomePanel& panel, int from_day, int to_day);

  std::size_t rows() const { return panel_->size(); }
  std::size_t cols() const { return width_; }
  int from_day() const { return from_day_; }
  int to_day() const { return to_day_; }
  std::span<const double> row(std::size_t user) const;

  Eigen::MatrixXd to_matrix() const;

 private:
  const OutcomePanel* panel_;
  int from_day_;
  int to_day_;
  std::size_t first_col_;
  std::size_t width_;
};

PanelWindow window(const OutcomePanel& panel, int from_day, int to_day);

// Sequential sum divided by the count. Shared by every "average over days"
// computation so equal inputs give bit-identical means.
double mean_of(std::span<const double> values);

double long_term_mean(const OutcomePanel& panel, std::size_t user);
double long_term_mean(const OutcomePanel& panel, const UserRecord& user);

}  // namespace surrokit
