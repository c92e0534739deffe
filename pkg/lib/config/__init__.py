from .defaults import _C as config
