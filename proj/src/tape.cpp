#include "hypertrust/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace hypertrust {

namespace {

std::string shape_of(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

} // namespace

Value Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return Value{static_cast<int>(nodes_.size() - 1)};
}

Tape::Node& Tape::at(Value v) {
    if (v.idx < 0 || v.idx >= static_cast<int>(nodes_.size())) throw std::invalid_argument("invalid tape handle");
    return nodes_[static_cast<std::size_t>(v.idx)];
}

const Tape::Node& Tape::at(Value v) const {
    if (v.idx < 0 || v.idx >= static_cast<int>(nodes_.size())) throw std::invalid_argument("invalid tape handle");
    return nodes_[static_cast<std::size_t>(v.idx)];
}

void Tape::check_same_shape(Value a, Value b, const char* what) const {
    const Matrix& ma = at(a).val;
    const Matrix& mb = at(b).val;
    if (ma.rows() != mb.rows() || ma.cols() != mb.cols()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + shape_of(ma) + " vs " + shape_of(mb));
    }
}

Value Tape::constant(Matrix m) {
    Node n;
    n.op = Op::Constant;
    n.val = std::move(m);
    n.needs_grad = false;
    return push(std::move(n));
}

Value Tape::parameter(Matrix m) {
    Node n;
    n.op = Op::Parameter;
    n.val = std::move(m);
    n.needs_grad = true;
    return push(std::move(n));
}

Value Tape::matmul(Value a, Value b) {
    const Matrix& ma = at(a).val;
    const Matrix& mb = at(b).val;
    if (ma.cols() != mb.rows()) {
        throw std::invalid_argument("matmul: shape mismatch " + shape_of(ma) + " * " + shape_of(mb));
    }
    Node n;
    n.op = Op::MatMul;
    n.a = a.idx;
    n.b = b.idx;
    n.val = ma * mb;
    n.needs_grad = at(a).needs_grad || at(b).needs_grad;
    return push(std::move(n));
}

Value Tape::transpose(Value a) {
    Node n;
    n.op = Op::Transpose;
    n.a = a.idx;
    n.val = at(a).val.transpose();
    n.needs_grad = at(a).needs_grad;
    return push(std::move(n));
}

Value Tape::add(Value a, Value b) {
    check_same_shape(a, b, "add");
    Node n;
    n.op = Op::Add;
    n.a = a.idx;
    n.b = b.idx;
    n.val = at(a).val + at(b).val;
    n.needs_grad = at(a).needs_grad || at(b).needs_grad;
    return push(std::move(n));
}

Value Tape::sub(Value a, Value b) {
    check_same_shape(a, b, "sub");
    Node n;
    n.op = Op::Sub;
    n.a = a.idx;
    n.b = b.idx;
    n.val = at(a).val - at(b).val;
    n.needs_grad = at(a).needs_grad || at(b).needs_grad;
    return push(std::move(n));
}

Value Tape::scale(Value a, double s) {
    Node n;
    n.op = Op::Scale;
    n.a = a.idx;
    n.c = s;
    n.val = s * at(a).val;
    n.needs_grad = at(a).needs_grad;
    return push(std::move(n));
}

Value Tape::add_scalar(Value a, double c) {
    Node n;
    n.op = Op::AddScalar;
    n.a = a.idx;
    n.c = c;
    n.val = at(a).val.array() + c;
    n.needs_grad = at(a).needs_grad;
    return push(std::move(n));
}

Value Tape::hadamard(Value a, Value b) {
    check_same_shape(a, b, "hadamard");
    Node n;
    n.op = Op::Hadamard;
    n.a = a.idx;
    n.b = b.idx;
    n.val = at(a).val.cwiseProduct(at(b).val);
    n.needs_grad = at(a).needs_grad || at(b).needs_grad;
    return push(std::move(n));
}

Value Tape::relu(Value a) {
    Node n;
    n.op = Op::Relu;
    n.a = a.idx;
    n.val = at(a).val.cwiseMax(0.0);
    n.needs_grad = at(a).needs_grad;
    return push(std::move(n));
}

Value Tape::colwise_mean(Value a) {
    Node n;
    n.op = Op::ColMean;
    n.a = a.idx;
    n.val = at(a).val.colwise().mean();
    n.needs_grad = at(a).needs_grad;
    return push(std::move(n));
}

Value Tape::colwise_std(Value a) {
    const Matrix& m = at(a).val;
    if (m.rows() < 2) {
        throw std::invalid_argument("colwise_std: needs at least 2 rows, got " + shape_of(m));
    }
    const Matrix centered = m.rowwise() - m.colwise().mean();
    Node n;
    n.op = Op::ColStd;
    n.a = a.idx;
    n.val = (centered.array().square().colwise().sum() / static_cast<double>(m.rows() - 1)).sqrt().matrix();
    n.needs_grad = at(a).needs_grad;
    return push(std::move(n));
}

Value Tape::sub_rows(Value a, Value row) {
    const Matrix& ma = at(a).val;
    const Matrix& mr = at(row).val;
    if (mr.rows() != 1 || mr.cols() != ma.cols()) {
        throw std::invalid_argument("sub_rows: shape mismatch " + shape_of(ma) + " vs row " + shape_of(mr));
    }
    Node n;
    n.op = Op::SubRows;
    n.a = a.idx;
    n.b = row.idx;
    n.val = ma.rowwise() - mr.row(0);
    n.needs_grad = at(a).needs_grad || at(row).needs_grad;
    return push(std::move(n));
}

Value Tape::div_rows(Value a, Value row) {
    const Matrix& ma = at(a).val;
    const Matrix& mr = at(row).val;
    if (mr.rows() != 1 || mr.cols() != ma.cols()) {
        throw std::invalid_argument("div_rows: shape mismatch " + shape_of(ma) + " vs row " + shape_of(mr));
    }
    Node n;
    n.op = Op::DivRows;
    n.a = a.idx;
    n.b = row.idx;
    n.val = ma.array().rowwise() / mr.row(0).array();
    n.needs_grad = at(a).needs_grad || at(row).needs_grad;
    return push(std::move(n));
}

Value Tape::frobenius_sq(Value a) {
    Node n;
    n.op = Op::FrobSq;
    n.a = a.idx;
    n.val = Matrix::Constant(1, 1, at(a).val.squaredNorm());
    n.needs_grad = at(a).needs_grad;
    return push(std::move(n));
}

Value Tape::sum(Value a) {
    Node n;
    n.op = Op::Sum;
    n.a = a.idx;
    n.val = Matrix::Constant(1, 1, at(a).val.sum());
    n.needs_grad = at(a).needs_grad;
    return push(std::move(n));
}

const Matrix& Tape::value(Value v) const {
    return at(v).val;
}

double Tape::scalar(Value v) const {
    const Matrix& m = at(v).val;
    if (m.rows() != 1 || m.cols() != 1) {
        throw std::invalid_argument("scalar: value is " + shape_of(m) + ", expected 1x1");
    }
    return m(0, 0);
}

void Tape::backward(Value root) {
    const Matrix& r = at(root).val;
    if (r.rows() != 1 || r.cols() != 1) {
        throw std::invalid_argument("backward: root is " + shape_of(r) + ", expected a 1x1 scalar");
    }
    for (auto& n : nodes_) n.grad.resize(0, 0);

    auto grad_of = [&](int idx) -> Matrix& {
        Node& n = nodes_[static_cast<std::size_t>(idx)];
        if (n.grad.size() == 0) n.grad = Matrix::Zero(n.val.rows(), n.val.cols());
        return n.grad;
    };

    grad_of(root.idx)(0, 0) = 1.0;

    for (int i = root.idx; i >= 0; --i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        if (!n.needs_grad || n.grad.size() == 0) continue;
        const Matrix& g = n.grad;
        switch (n.op) {
            case Op::Constant:
            case Op::Parameter:
                break;
            case Op::MatMul: {
                const Node& na = nodes_[static_cast<std::size_t>(n.a)];
                const Node& nb = nodes_[static_cast<std::size_t>(n.b)];
                if (na.needs_grad) grad_of(n.a).noalias() += g * nb.val.transpose();
                if (nb.needs_grad) grad_of(n.b).noalias() += na.val.transpose() * g;
                break;
            }
            case Op::Transpose:
                grad_of(n.a) += g.transpose();
                break;
            case Op::Add:
                if (nodes_[static_cast<std::size_t>(n.a)].needs_grad) grad_of(n.a) += g;
                if (nodes_[static_cast<std::size_t>(n.b)].needs_grad) grad_of(n.b) += g;
                break;
            case Op::Sub:
                if (nodes_[static_cast<std::size_t>(n.a)].needs_grad) grad_of(n.a) += g;
                if (nodes_[static_cast<std::size_t>(n.b)].needs_grad) grad_of(n.b) -= g;
                break;
            case Op::Scale:
                grad_of(n.a) += n.c * g;
                break;
            case Op::AddScalar:
                grad_of(n.a) += g;
                break;
            case Op::Hadamard: {
                const Node& na = nodes_[static_cast<std::size_t>(n.a)];
                const Node& nb = nodes_[static_cast<std::size_t>(n.b)];
                if (na.needs_grad) grad_of(n.a) += g.cwiseProduct(nb.val);
                if (nb.needs_grad) grad_of(n.b) += g.cwiseProduct(na.val);
                break;
            }
            case Op::Relu: {
                const Matrix& x = nodes_[static_cast<std::size_t>(n.a)].val;
                grad_of(n.a).array() += g.array() * (x.array() > 0.0).cast<double>();
                break;
            }
            case Op::ColMean: {
                const Matrix& x = nodes_[static_cast<std::size_t>(n.a)].val;
                const double inv_n = 1.0 / static_cast<double>(x.rows());
                grad_of(n.a).rowwise() += (inv_n * g).row(0);
                break;
            }
            case Op::ColStd: {
                // ds_j/dx_ij = (x_ij - mean_j) / ((n-1) s_j); 0 on degenerate columns.
                const Matrix& x = nodes_[static_cast<std::size_t>(n.a)].val;
                const Matrix centered = x.rowwise() - x.colwise().mean();
                Eigen::RowVectorXd scale(x.cols());
                for (Index j = 0; j < x.cols(); ++j) {
                    const double s = n.val(0, j);
                    scale(j) = s > 0.0 ? g(0, j) / (static_cast<double>(x.rows() - 1) * s) : 0.0;
                }
                grad_of(n.a).array() += centered.array().rowwise() * scale.array();
                break;
            }
            case Op::SubRows: {
                const Node& na = nodes_[static_cast<std::size_t>(n.a)];
                const Node& nb = nodes_[static_cast<std::size_t>(n.b)];
                if (na.needs_grad) grad_of(n.a) += g;
                if (nb.needs_grad) grad_of(n.b) -= g.colwise().sum();
                break;
            }
            case Op::DivRows: {
                const Node& na = nodes_[static_cast<std::size_t>(n.a)];
                const Node& nb = nodes_[static_cast<std::size_t>(n.b)];
                const auto row = nb.val.row(0).array();
                if (na.needs_grad) grad_of(n.a).array() += g.array().rowwise() / row;
                if (nb.needs_grad) {
                    // dv_j = -sum_i g_ij * x_ij / v_j^2
                    grad_of(n.b).row(0).array() -=
                        (g.array() * na.val.array()).colwise().sum() / (row * row);
                }
                break;
            }
            case Op::FrobSq:
                grad_of(n.a) += 2.0 * g(0, 0) * nodes_[static_cast<std::size_t>(n.a)].val;
                break;
            case Op::Sum:
                grad_of(n.a).array() += g(0, 0);
                break;
        }
    }
}

Matrix Tape::grad(Value v) const {
    const Node& n = at(v);
    if (n.grad.size() == 0) return Matrix::Zero(n.val.rows(), n.val.cols());
    return n.grad;
}

Vector diag_inverse(const Vector& v, double eps) {
    return (v.array() + eps).inverse();
}

std::pair<double, std::vector<Matrix>> evaluate_with_gradients(const TapeProgram& program,
                                                               const std::vector<Matrix>& params) {
    Tape tape;
    std::vector<Value> leaves;
    leaves.reserve(params.size());
    for (const auto& p : params) leaves.push_back(tape.parameter(p));
    const Value root = program(tape, leaves);
    const double loss = tape.scalar(root); // rejects non-scalar roots
    tape.backward(root);
    std::vector<Matrix> grads;
    grads.reserve(params.size());
    for (const Value v : leaves) grads.push_back(tape.grad(v));
    return {loss, std::move(grads)};
}

std::vector<Matrix> finite_difference_gradient(const TapeProgram& program,
                                               const std::vector<Matrix>& params, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: h must be > 0");

    auto eval = [&](const std::vector<Matrix>& p) {
        Tape tape;
        std::vector<Value> leaves;
        leaves.reserve(p.size());
        for (const auto& m : p) leaves.push_back(tape.parameter(m));
        return tape.scalar(program(tape, leaves));
    };

    std::vector<Matrix> grads;
    grads.reserve(params.size());
    std::vector<Matrix> work = params;
    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix g(params[k].rows(), params[k].cols());
        for (Index i = 0; i < params[k].rows(); ++i) {
            for (Index j = 0; j < params[k].cols(); ++j) {
                const double orig = work[k](i, j);
                work[k](i, j) = orig + h;
                const double up = eval(work);
                work[k](i, j) = orig - h;
                const double down = eval(work);
                work[k](i, j) = orig;
                g(i, j) = (up - down) / (2.0 * h);
            }
        }
        grads.push_back(std::move(g));
    }
    return grads;
}

} // namespace hypertrust
