#pragma once

#include <stdexcept>
#include <string>

namespace fivewise {

// A resource guard tripped before the requested values were resolved.
class BudgetExceeded : public std::runtime_error
{
  public:
    BudgetExceeded(std::string const& what, int level)
        : std::runtime_error(what + " (level " + std::to_string(level) + ")"), level_(level)
    {
    }
    int level() const noexcept { return level_; }

  private:
    int level_;
};

// Fewer marks than requested exist in the supplied window.
class InsufficientMarks : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// A block needed for a covering is cut by the sampled window.
class IncompleteBlock : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace fivewise
