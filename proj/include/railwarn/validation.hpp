#ifndef RAILWARN_VALIDATION_HPP
#define RAILWARN_VALIDATION_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace railwarn {

struct ValidationIssue {
    std::string field; // dotted path, e.g. "obus[0].road"
    std::string message;

    std::string to_string() const { return field.empty() ? message : field + ": " + message; }
};

/// Carries every issue found, not just the first.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<ValidationIssue> issues)
        : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

    const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

private:
    static std::string summarize(const std::vector<ValidationIssue>& issues) {
        std::string s = std::to_string(issues.size()) + " validation error(s)";
        for (const auto& i : issues)
            s += "\n  " + i.to_string();
        return s;
    }

    std::vector<ValidationIssue> issues_;
};

} // namespace railwarn

#endif // RAILWARN_VALIDATION_HPP
