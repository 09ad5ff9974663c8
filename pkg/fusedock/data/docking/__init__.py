from fusedock.data.docking.config import (
    CameraConfig,
    RenderConfig,
    SequenceBuildConfig,
    AugmentConfig,
    default_build_configs,
    experimental_build_configs,
    miniature_build_configs,
    target_from_lvlh,
)
from fusedock.data.docking.sequence_io import (
    FrameRecord,
    SequenceRecord,
    load_sequence,
    write_index,
    discover_sequences,
    frame_file_name,
    INDEX_FILE,
)
from fusedock.data.docking.build import build_sequence, build_dataset
from fusedock.data.docking.split import SplitPlan, split, write_split, read_split, CHUNK_SECONDS
