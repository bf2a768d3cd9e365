from fspcr.dataset_readers.manifest import ManifestReader, read_truth, write_dataset, write_truth
