#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace alame {

/// Evaluation requested inside the exclusion radius of a pole.
class pole_error : public std::domain_error {
public:
    pole_error(const std::string& what, std::complex<double> where)
        : std::domain_error(what), location(where) {}
    std::complex<double> location;
};

/// An iterative scheme failed to converge; carries the last iterate.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what,
                           std::complex<double> last = {0.0, 0.0})
        : std::runtime_error(what), last_iterate(last) {}
    std::complex<double> last_iterate;
};

/// Energy hits one of the isolated degenerate configurations (repeated
/// polynomial zeros, vanishing minor denominators); typically a band edge.
class degenerate_energy_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Transformation parameters violate a placement rule (energy outside the
/// allowed range, factorization energies in different gaps, ...).
class spec_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A seed combination that must be nodeless has a detected node.
class node_error : public std::runtime_error {
public:
    node_error(const std::string& what, double where)
        : std::runtime_error(what), location(where) {}
    double location;
};

} // namespace alame
