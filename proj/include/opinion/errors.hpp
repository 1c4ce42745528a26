#pragma once

#include <stdexcept>
#include <string>

namespace opinion {

// Base for all library errors. `code()` is a stable machine-readable
// identifier; the CLI maps codes to exit statuses and error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error("ConfigInvalid", what) {}
};

class ModelMismatch : public Error {
public:
    explicit ModelMismatch(const std::string& what) : Error("ModelMismatch", what) {}
};

class MassLeak : public Error {
public:
    explicit MassLeak(const std::string& what) : Error("MassLeak", what) {}
};

class CostCapExceeded : public Error {
public:
    explicit CostCapExceeded(const std::string& what) : Error("CostCapExceeded", what) {}
};

class SearchSpaceTooLarge : public Error {
public:
    explicit SearchSpaceTooLarge(const std::string& what) : Error("SearchSpaceTooLarge", what) {}
};

class StepSizeTooCoarse : public Error {
public:
    explicit StepSizeTooCoarse(const std::string& what) : Error("StepSizeTooCoarse", what) {}
};

class DegenerateCase : public Error {
public:
    explicit DegenerateCase(const std::string& what) : Error("DegenerateCase", what) {}
};

class NumericalBlowup : public Error {
public:
    explicit NumericalBlowup(const std::string& what) : Error("NumericalBlowup", what) {}
};

class PhaseMismatch : public Error {
public:
    explicit PhaseMismatch(const std::string& what) : Error("PhaseMismatch", what) {}
};

class ConfigMismatch : public Error {
public:
    explicit ConfigMismatch(const std::string& what) : Error("ConfigMismatch", what) {}
};

class InvalidSwapSite : public Error {
public:
    explicit InvalidSwapSite(const std::string& what) : Error("InvalidSwapSite", what) {}
};

class MultipleSignChanges : public Error {
public:
    explicit MultipleSignChanges(const std::string& what) : Error("MultipleSignChanges", what) {}
};

class IoFailure : public Error {
public:
    explicit IoFailure(const std::string& what) : Error("IoFailure", what) {}
};

}  // namespace opinion
