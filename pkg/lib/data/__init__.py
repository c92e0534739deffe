from .io import AtomicWriter, format_float, to_serializable, config_sidecar_path, write_json, read_json, \
    write_sidecar, write_csv, read_csv, write_table, header_with_units
