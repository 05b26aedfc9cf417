//! Lossless PNG codec plus ensemble directory layout (`manifest.json` + images).

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufReader, BufWriter, Cursor};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::{GrayImage, SCM_SIZE};
use crate::manifest::{EnsembleManifest, ImageRecord, ModelId, MANIFEST_FILE};

/// Optional per-image class labels for external directories: `{"file.png": class}`.
pub const LABELS_FILE: &str = "labels.json";

/// Smallest side accepted for external images.
pub const MIN_EXTERNAL_SIZE: usize = 64;

pub fn encode_png(image: &GrayImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, image.width() as u32, image.height() as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(png_err)?;
        writer.write_image_data(image.pixels()).map_err(png_err)?;
        writer.finish().map_err(png_err)?;
    }
    Ok(out)
}

fn png_err(e: png::EncodingError) -> Error {
    Error::Format {
        what: "png",
        message: e.to_string(),
    }
}

pub fn decode_png(bytes: &[u8], path: &Path) -> Result<GrayImage> {
    let decode_err = |message: String| Error::Decode {
        path: path.to_path_buf(),
        message,
    };
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| decode_err(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| decode_err("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| decode_err(e.to_string()))?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(decode_err(format!(
            "expected 8-bit grayscale, found {:?} {:?}",
            info.color_type, info.bit_depth
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let mut pixels = Vec::with_capacity(w * h);
    for row in buf.chunks(info.line_size).take(h) {
        pixels.extend_from_slice(&row[..w]);
    }
    GrayImage::from_pixels(w, h, pixels)
}

pub fn read_png(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_png(&bytes, path)
}

pub fn write_png(path: &Path, image: &GrayImage) -> Result<()> {
    let bytes = encode_png(image)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    std::io::Write::write_all(&mut w, text.as_bytes()).map_err(|e| Error::io(path, e))?;
    std::io::Write::flush(&mut w).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn check_dimensions(model: ModelId, name: &str, image: &GrayImage) -> Result<()> {
    let ok = if model.is_scm() {
        image.is_scm_sized()
    } else {
        image.width() == image.height() && image.width() >= MIN_EXTERNAL_SIZE
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Dimension {
            name: name.to_string(),
            width: image.width(),
            height: image.height(),
            expected: if model.is_scm() {
                format!("{SCM_SIZE}x{SCM_SIZE}")
            } else {
                format!("square, side >= {MIN_EXTERNAL_SIZE}")
            },
        })
    }
}

/// An ensemble on disk: a parsed manifest plus on-demand image access.
#[derive(Clone, Debug)]
pub struct Ensemble {
    dir: PathBuf,
    manifest: EnsembleManifest,
}

impl Ensemble {
    pub fn manifest(&self) -> &EnsembleManifest {
        &self.manifest
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn len(&self) -> usize {
        self.manifest.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.manifest.records.is_empty()
    }

    /// Decodes and validates image `index`.
    pub fn image(&self, index: usize) -> Result<GrayImage> {
        let record = &self.manifest.records[index];
        let img = read_png(&self.dir.join(&record.file))?;
        check_dimensions(self.manifest.model_id, &record.file, &img)?;
        Ok(img)
    }

    /// Lazily decodes images in manifest order.
    pub fn images(&self) -> impl Iterator<Item = Result<(&ImageRecord, GrayImage)>> + '_ {
        (0..self.len()).map(move |i| self.image(i).map(|img| (&self.manifest.records[i], img)))
    }

    pub fn into_manifest(self) -> EnsembleManifest {
        self.manifest
    }
}

/// Opens an ensemble directory written by [`save_ensemble`].
///
/// Every file listed in the manifest must exist; pixel data is decoded on demand.
pub fn load_ensemble(dir: impl AsRef<Path>) -> Result<Ensemble> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST_FILE);
    if !manifest_path.is_file() {
        return Err(Error::MissingFile(manifest_path.display().to_string()));
    }
    let manifest = EnsembleManifest::from_json(&read_text(&manifest_path)?)?;
    for r in &manifest.records {
        if !dir.join(&r.file).is_file() {
            return Err(Error::MissingFile(r.file.clone()));
        }
    }
    Ok(Ensemble {
        dir: dir.to_path_buf(),
        manifest,
    })
}

/// Opens either a manifest-backed ensemble or a bare directory of PNG files.
///
/// Bare directories become `external` ensembles (sorted by filename), with
/// classes taken from an optional `labels.json`.
pub fn load_any(dir: impl AsRef<Path>) -> Result<Ensemble> {
    let dir = dir.as_ref();
    if dir.join(MANIFEST_FILE).is_file() {
        return load_ensemble(dir);
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.to_ascii_lowercase().ends_with(".png") {
            files.push(name);
        }
    }
    files.sort();
    let labels: BTreeMap<String, u32> = {
        let path = dir.join(LABELS_FILE);
        if path.is_file() {
            serde_json::from_str(&read_text(&path)?).map_err(|e| Error::Format {
                what: "labels",
                message: e.to_string(),
            })?
        } else {
            BTreeMap::new()
        }
    };
    let records = files
        .into_iter()
        .map(|f| {
            let class = labels.get(&f).copied();
            ImageRecord::new(f, None, class)
        })
        .collect();
    Ok(Ensemble {
        dir: dir.to_path_buf(),
        manifest: EnsembleManifest::new(ModelId::External, 0, records),
    })
}

/// Writes every image and then the manifest into `dir` (created if needed).
///
/// `images` must yield one image per manifest record, in record order.
pub fn save_ensemble<I>(manifest: &EnsembleManifest, images: I, dir: impl AsRef<Path>) -> Result<()>
where
    I: IntoIterator<Item = GrayImage>,
{
    let dir = dir.as_ref();
    manifest.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = 0usize;
    let mut names = HashSet::new();
    for (record, image) in manifest.records.iter().zip(images) {
        if !names.insert(record.file.as_str()) {
            return Err(Error::DuplicateFile(record.file.clone()));
        }
        check_dimensions(manifest.model_id, &record.file, &image)?;
        write_png(&dir.join(&record.file), &image)?;
        written += 1;
    }
    if written != manifest.records.len() {
        return Err(Error::LengthMismatch {
            left: written,
            right: manifest.records.len(),
        });
    }
    write_text(&dir.join(MANIFEST_FILE), &manifest.to_json()?)
}

/// Reads an image file of any path (used for glyph overrides and external inputs).
pub fn read_image_file(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    std::io::Read::read_to_end(&mut BufReader::new(file), &mut bytes)
        .map_err(|e| Error::io(path, e))?;
    decode_png(&bytes, path)
}
