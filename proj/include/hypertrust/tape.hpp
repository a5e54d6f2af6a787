#pragma once

#include "hypertrust/types.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hypertrust {

// Handle into a Tape; cheap to copy.
struct Value {
    int idx = -1;
};

/// Reverse-mode gradient tape over dense matrices.
///
/// Operations append nodes in topological order; backward() walks them once
/// in reverse, accumulating gradients additively across fan-out. Scalars are
/// 1x1 matrices. Constants do not receive gradients.
class Tape {
public:
    Value constant(Matrix m);
    Value parameter(Matrix m);

    Value matmul(Value a, Value b);
    Value transpose(Value a);
    Value add(Value a, Value b);
    Value sub(Value a, Value b);
    Value scale(Value a, double s);
    Value add_scalar(Value a, double c);
    Value hadamard(Value a, Value b);
    Value relu(Value a);
    Value colwise_mean(Value a); // n x d -> 1 x d
    Value colwise_std(Value a);  // sample std (n-1 denominator); needs n >= 2
    Value sub_rows(Value a, Value row); // subtract a 1 x d row from every row
    Value div_rows(Value a, Value row); // divide every row by a 1 x d row
    Value frobenius_sq(Value a); // -> 1 x 1
    Value sum(Value a);          // -> 1 x 1

    const Matrix& value(Value v) const;
    double scalar(Value v) const;

    // Seeds d(root)/d(root) = 1 and accumulates gradients into every
    // contributing node. root must be 1x1.
    void backward(Value root);

    // Gradient of the last backward() root w.r.t. v (zero matrix when v
    // does not influence the root).
    Matrix grad(Value v) const;

    std::size_t size() const { return nodes_.size(); }

private:
    enum class Op {
        Constant, Parameter, MatMul, Transpose, Add, Sub, Scale, AddScalar,
        Hadamard, Relu, ColMean, ColStd, SubRows, DivRows, FrobSq, Sum,
    };

    struct Node {
        Op op;
        int a = -1;
        int b = -1;
        double c = 0.0;
        Matrix val;
        Matrix grad;
        bool needs_grad = false;
    };

    Value push(Node node);
    Node& at(Value v);
    const Node& at(Value v) const;
    void check_same_shape(Value a, Value b, const char* what) const;

    std::vector<Node> nodes_;
};

// 1 / (v_i + eps) per element; guards zero degrees.
Vector diag_inverse(const Vector& v, double eps = 1e-12);

// A scalar-valued composition of tape operations: receives the tape and one
// leaf Value per parameter, returns the loss Value.
using TapeProgram = std::function<Value(Tape&, const std::vector<Value>&)>;

// Runs the program with the given parameter values and returns the loss and
// its analytic reverse-mode gradient per parameter. Rejects programs whose
// root is not 1x1.
std::pair<double, std::vector<Matrix>> evaluate_with_gradients(const TapeProgram& program,
                                                               const std::vector<Matrix>& params);

// Central differences (f(p+h) - f(p-h)) / 2h per scalar parameter entry.
std::vector<Matrix> finite_difference_gradient(const TapeProgram& program,
                                               const std::vector<Matrix>& params, double h);

} // namespace hypertrust
