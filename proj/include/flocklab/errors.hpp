#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace flocklab {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid model parameters or malformed topology.
class ModelError : public Error
{
public:
  ModelError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field))
  {
  }

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Base class for failures of a numerical procedure (as opposed to bad input).
class NumericError : public Error
{
public:
  using Error::Error;
};

/// State became non-finite during time integration.
class BlowUpError : public NumericError
{
public:
  BlowUpError(double time, const std::string& what)
      : NumericError(what), time_(time)
  {
  }

  double time() const noexcept { return time_; }

private:
  double time_;
};

/// Linear system is (numerically) singular at the requested frequency.
class SingularSystemError : public NumericError
{
public:
  SingularSystemError(double omega, const std::string& what)
      : NumericError(what), omega_(omega)
  {
  }

  double omega() const noexcept { return omega_; }

private:
  double omega_;
};

class ConvergenceError : public NumericError
{
public:
  ConvergenceError(const std::string& what,
                   std::vector<std::complex<double>> partial)
      : NumericError(what), partial_(std::move(partial))
  {
  }

  /// Whatever eigenvalues the solver had produced when it gave up.
  const std::vector<std::complex<double>>& partial() const noexcept
  {
    return partial_;
  }

private:
  std::vector<std::complex<double>> partial_;
};

/// Heading is undefined because an agent's speed fell below the guard.
class SingularityError : public NumericError
{
public:
  SingularityError(int agent, double time, const std::string& what)
      : NumericError(what), agent_(agent), time_(time)
  {
  }

  int agent() const noexcept { return agent_; }
  double time() const noexcept { return time_; }

private:
  int agent_;
  double time_;
};

/// A family member violates a precondition of the stability analysis.
class FamilyError : public NumericError
{
public:
  FamilyError(int followers, const std::string& what)
      : NumericError(what), followers_(followers)
  {
  }

  int followers() const noexcept { return followers_; }

private:
  int followers_;
};

} // namespace flocklab
