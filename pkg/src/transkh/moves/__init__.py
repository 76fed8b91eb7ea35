"""Chain-level records for closure moves, with verification helpers."""

from .records import (ChainMapRecord, cancel_pair, contract_level,
                      contract_levels, build_cone, cone_comparison_target,
                      cone_comparison_source, same_matrix)
from .elementary import (conjugate_shift, far_transposition,
                         stabilize_record, destabilize_record,
                         insert_rii_record, delete_rii_record,
                         signed_iso_record)
from .r3 import slide_pattern, slide_word, triple_slide_record
from .scripts import (Move, move, parse_script, format_script, apply_move,
                      apply_script, move_record, script_records,
                      flype_script, random_script)
from .verify import (verify_markov, verify_diff_markov, verify_neg_stab,
                     verify_flype, verify_diff_flype,
                     verify_destab_vanishing, verify_stab_once_rational,
                     move_support_report, random_move_instance)
