"""Software model of an FPGA image pipeline: streaming 5x5 filtering,
mean-threshold binarization and an RC4-encrypted image link."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DimensionError,
    EmptyImageError,
    EndOfStream,
    FrameTooLargeError,
    IntegrityError,
    KeyLengthError,
    ParseError,
    ProtocolError,
    SvipError,
    TransportError,
    TruncationError,
    UnsupportedFormatError,
    VersionError,
)
from .filters import (  # noqa: E402
    Kernel,
    box_kernel_5x5,
    convolve_direct,
    convolve_streaming,
    saturate_narrow,
)
from .imaging import (  # noqa: E402
    BinaryPlane,
    ImagePlane,
    RgbImage,
    binary_to_display,
    load_image,
    merge_channels,
    save_image,
    split_channels,
)
from .rc4 import Rc4State, apply_keystream, keystream, ksa  # noqa: E402
from .threshold import (  # noqa: E402
    ThresholdRange,
    binarize,
    binarize_color,
    binarize_gray,
    combine_rgb,
    histogram,
    mean_threshold,
)
from .transport import decode_frame, encode_frame, recv_image, send_image  # noqa: E402
