#include "waylab/graded.hpp"

namespace waylab {

template class BasicGradedVector<double>;
template class BasicBlockMap<double>;
template struct BasicObjectState<double>;

template ConstraintReport check_conserving<double>(const BasicBlockMap<double>&);
template CMatrix<double> unitary_completion<double>(const BasicBlockMap<double>::Block&, double);

}  // namespace waylab
