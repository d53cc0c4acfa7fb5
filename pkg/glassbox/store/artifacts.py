from glassbox.store.config import DATASET, FEATURES, MODEL, ATTRIBUTIONS, EMBEDDINGS, PDP, REPORT, TRUTH_DIR, BINARY
from glassbox.store.service import write_artifact, read_artifact, array_payload, Artifact
from glassbox.store.codec import encode_csv
from glassbox.store.views import ArtifactError
from glassbox.simulation.views import SimConfig, SubjectDataset, GroundTruth, TrajectoryDictionary, Split
from glassbox.features.views import FeatureMatrix, Standardization
from glassbox.interpretable.views import SparseLogisticFit, DecisionTreeFit, MajorityClassifier
from glassbox.transformer.views import TransformerConfig, EpochLog
from glassbox.transformer.config import PLAIN, CBM
from glassbox.transformer.service import TrainedTransformer, build_model
from glassbox.explain.views import Attribution, EmbeddingSet, PdpProfile, ProbeStep
from glassbox.explain import render
from glassbox.evalbench.views import EvalReport
from dataclasses import dataclass, asdict
from typing import Union
from pathlib import Path
import numpy as np
import json
import csv
import io

GlassboxFit=Union[SparseLogisticFit,DecisionTreeFit,MajorityClassifier]

DATASET_AXES={
    'X':['subject','time','species'],
    'y':['subject'],
    'concepts':['subject','community'],
    'is_val':['subject'],
    f'{TRUTH_DIR}/theta':['subject','community'],
    f'{TRUTH_DIR}/entries':['community','time','species'],
    f'{TRUTH_DIR}/kinds':['community','species'],
    f'{TRUTH_DIR}/bloom_centers':['bloom','field'],
    f'{TRUTH_DIR}/cluster_id':['subject'],
    f'{TRUTH_DIR}/disease_clusters':['cluster'],
}

def _to_json(document)->str:
    return json.dumps(document,indent=2,sort_keys=True)

def _standardization_document(standardization:Standardization)->dict:
    return {'mean':standardization.mean.tolist(),'std':standardization.std.tolist(),
        'zero_variance':standardization.zero_variance.tolist()}

def _standardization_from(document:dict)->Standardization:
    return Standardization(mean=np.asarray(document['mean'],dtype=np.float64),
        std=np.asarray(document['std'],dtype=np.float64),
        zero_variance=np.asarray(document['zero_variance'],dtype=bool))

def save_dataset(dataset:SubjectDataset, path:str|Path, fmt:str=BINARY, overwrite:bool=False)->Path:
    '''
    Dataset directory: X, labels, concepts and the validation flag, plus the generative ground truth under
    truth/ (optional on read). Arrays are GBL1 binary or long-format CSV.
    '''
    arrays={'X':dataset.X,'y':dataset.y,'concepts':dataset.concepts,'is_val':dataset.val_mask.astype(np.int8)}
    dtypes={'X':'float64','y':'int64','concepts':'int8','is_val':'bool'}
    truth=dataset.ground_truth
    if truth is not None:
        centers=np.asarray(truth.dictionary.bloom_centers,dtype=np.int64).reshape(-1,3)
        arrays|={
            f'{TRUTH_DIR}/theta':truth.theta,
            f'{TRUTH_DIR}/entries':truth.dictionary.entries,
            f'{TRUTH_DIR}/kinds':truth.dictionary.kinds,
            f'{TRUTH_DIR}/bloom_centers':centers,
            f'{TRUTH_DIR}/cluster_id':truth.cluster_id,
            f'{TRUTH_DIR}/disease_clusters':np.asarray(truth.disease_clusters,dtype=np.int64),
        }
        dtypes|={f'{TRUTH_DIR}/theta':'float64',f'{TRUTH_DIR}/entries':'float64',f'{TRUTH_DIR}/kinds':'int8',
            f'{TRUTH_DIR}/bloom_centers':'int64',f'{TRUTH_DIR}/cluster_id':'int64',f'{TRUTH_DIR}/disease_clusters':'int64'}
    files,specs={},{}
    for name,array in arrays.items():
        file,data,spec=array_payload(name,array,fmt,DATASET_AXES[name],dtypes[name])
        files[file]=data
        specs[name]=spec
    summary=asdict(dataset.summary())|{'format':fmt}
    files['summary.txt']=dataset.summary().to_string()+'\n'
    return write_artifact(path,DATASET,files,config=dataset.config.model_dump(mode='json'),seed=dataset.config.seed,
        arrays=specs,optional=[TRUTH_DIR],summary=summary,overwrite=overwrite)

def dataset_from_artifact(artifact:Artifact)->SubjectDataset:
    config=SimConfig.model_validate(artifact.manifest.config)
    is_val=artifact.array('is_val').astype(bool)
    split=np.where(is_val,Split.VAL,Split.TRAIN).astype('<U5')
    ground_truth=None
    if all(artifact.has_array(f'{TRUTH_DIR}/{name}') for name in ('theta','entries','kinds','bloom_centers','cluster_id')):
        centers=artifact.array(f'{TRUTH_DIR}/bloom_centers')
        dictionary=TrajectoryDictionary(entries=artifact.array(f'{TRUTH_DIR}/entries'),
            kinds=artifact.array(f'{TRUTH_DIR}/kinds'),bloom_centers=[tuple(int(v) for v in row) for row in centers])
        ground_truth=GroundTruth(theta=artifact.array(f'{TRUTH_DIR}/theta'),dictionary=dictionary,
            cluster_id=artifact.array(f'{TRUTH_DIR}/cluster_id'),
            disease_clusters=tuple(int(c) for c in artifact.array(f'{TRUTH_DIR}/disease_clusters')),
            tukey_window=config.tukey_window,concept_threshold=config.concept_threshold)
    return SubjectDataset(X=artifact.array('X'),y=artifact.array('y'),concepts=artifact.array('concepts'),
        split=split,config=config,ground_truth=ground_truth)

def load_dataset(path:str|Path, verify:bool=True)->SubjectDataset:
    '''Dataset from a dataset artifact; ground_truth is None when truth/ has been removed.'''
    return dataset_from_artifact(read_artifact(path,DATASET,verify=verify))

def save_features(matrix:FeatureMatrix, path:str|Path, dataset_path:str|Path, fmt:str=BINARY,
    overwrite:bool=False)->Path:
    file,data,spec=array_payload('values',matrix.values,fmt,['subject','feature'],'float64')
    files={file:data,'feature_names.json':_to_json(matrix.feature_names)}
    if matrix.standardization is not None:
        files['standardization.json']=_to_json(_standardization_document(matrix.standardization))
    return write_artifact(path,FEATURES,files,config={'representation':matrix.representation},arrays={'values':spec},
        upstream=[dataset_path],summary={'representation':matrix.representation,'n_rows':matrix.n_rows,
        'n_features':matrix.n_features},overwrite=overwrite)

def load_features(path:str|Path)->FeatureMatrix:
    artifact=read_artifact(path,FEATURES)
    standardization=None
    if artifact.has('standardization.json'):
        standardization=_standardization_from(artifact.read_json('standardization.json'))
    return FeatureMatrix(values=artifact.array('values'),feature_names=artifact.read_json('feature_names.json'),
        representation=artifact.manifest.config['representation'],standardization=standardization)

def save_glassbox_model(fit:GlassboxFit, path:str|Path, dataset_path:str|Path, representation:str,
    overwrite:bool=False, figures:bool=True)->Path:
    '''Sparse logistic, tree or majority fit as a JSON document; the lambda path and its plot when present.'''
    if isinstance(fit,SparseLogisticFit):
        document,name=fit.to_dict(),'sparse_logistic'
        summary={'n_active_features':fit.n_active,'lambda':fit.lam,'converged':fit.converged}
    elif isinstance(fit,DecisionTreeFit):
        document,name=fit.to_dict(),'tree'
        summary={'n_splits':fit.n_splits,'n_leaves':fit.n_leaves,'depth':fit.depth}
    elif isinstance(fit,MajorityClassifier):
        document,name={'model':'majority','probability':fit.probability,'n_features':fit.n_features},'majority'
        summary={'probability':fit.probability}
    else:
        raise ValueError(f"Cannot store a {type(fit).__name__} as a glass-box model")
    files={'model.json':_to_json(document)}
    arrays={}
    if isinstance(fit,SparseLogisticFit) and fit.path_coefficients is not None:
        file,data,spec=array_payload('path_coefficients',fit.path_coefficients,BINARY,['lambda','feature'],'float64')
        files[file]=data
        arrays['path_coefficients']=spec
        if fit.path_intercepts is not None:
            file,data,spec=array_payload('path_intercepts',fit.path_intercepts,BINARY,['lambda'],'float64')
            files[file]=data
            arrays['path_intercepts']=spec
        if figures:
            files['coefficient_path.svg']=lambda target:render.coefficient_path(fit,target)
    if isinstance(fit,DecisionTreeFit):
        files['rules.txt']=fit.describe()+'\n'
    return write_artifact(path,MODEL,files,config={'model':name,'representation':representation},arrays=arrays,
        upstream=[dataset_path],summary={'model':name,'representation':representation}|summary,overwrite=overwrite)

def _training_log_csv(log:list[EpochLog])->str:
    buffer=io.StringIO()
    writer=csv.writer(buffer,lineterminator='\n')
    writer.writerow(['epoch','split','loss','accuracy','concept_auc'])
    for row in log:
        writer.writerow([row.epoch,'train',repr(row.train_loss),repr(row.train_accuracy),''])
        auc='' if row.val_concept_auc is None else repr(row.val_concept_auc)
        writer.writerow([row.epoch,'val',repr(row.val_loss),repr(row.val_accuracy),auc])
    return buffer.getvalue()

def _training_log_from(text:str)->list[EpochLog]:
    rows={}
    for record in csv.DictReader(io.StringIO(text)):
        entry=rows.setdefault(int(record['epoch']),{})
        entry[record['split']]=record
    log=[]
    for epoch in sorted(rows):
        train,val=rows[epoch]['train'],rows[epoch]['val']
        log.append(EpochLog(epoch=epoch,train_loss=float(train['loss']),train_accuracy=float(train['accuracy']),
            val_loss=float(val['loss']),val_accuracy=float(val['accuracy']),
            val_concept_auc=float(val['concept_auc']) if val['concept_auc'] else None))
    return log

def save_transformer(trained:TrainedTransformer, path:str|Path, dataset_path:str|Path, overwrite:bool=False)->Path:
    '''
    Checkpoint directory: one GBL1 file per parameter under params/, a parameter manifest mapping names to
    files and shapes, the token standardization, and the training log CSV (epoch, split, loss, accuracy).
    '''
    files,arrays,parameters={},{},{}
    for name,value in trained.model.state_dict().items():
        file,data,spec=array_payload(f'params/{name}',value,BINARY,None,'float32')
        files[file]=data
        arrays[name]=spec
        parameters[name]={'file':file,'shape':list(value.shape)}
    files['params.json']=_to_json(parameters)
    files['standardization.json']=_to_json(_standardization_document(trained.standardization))
    if trained.concept_medians is not None:
        files['concept_medians.json']=_to_json(trained.concept_medians.tolist())
    files['training_log.csv']=_training_log_csv(trained.log)
    final=trained.log[-1] if trained.log else None
    summary={'model':trained.mode,'representation':'raw','n_parameters':trained.model.n_parameters(),
        'epochs':len(trained.log),'val_accuracy':final.val_accuracy if final else None,
        'train_seconds':trained.train_seconds}
    return write_artifact(path,MODEL,files,config={'model':trained.mode,'representation':'raw',
        'transformer':trained.config.model_dump(mode='json')},seed=trained.config.seed,arrays=arrays,
        upstream=[dataset_path],summary=summary,overwrite=overwrite)

def transformer_from_artifact(artifact:Artifact)->TrainedTransformer:
    config=TransformerConfig.model_validate(artifact.manifest.config['transformer'])
    mode=artifact.manifest.config['model']
    model=build_model(config,mode)
    parameters=artifact.read_json('params.json')
    model.load_state_dict({name:artifact.array(name) for name in parameters})
    medians=np.asarray(artifact.read_json('concept_medians.json')) if artifact.has('concept_medians.json') else None
    return TrainedTransformer(model=model,config=config,mode=mode,
        standardization=_standardization_from(artifact.read_json('standardization.json')),
        log=_training_log_from(artifact.read_text('training_log.csv')),concept_medians=medians,
        train_seconds=float(artifact.manifest.summary.get('train_seconds',0.0)))

def load_transformer(path:str|Path)->TrainedTransformer:
    return transformer_from_artifact(read_artifact(path,MODEL))

@dataclass
class LoadedModel:
    name:str
    representation:str
    fit:GlassboxFit|TrainedTransformer
    artifact:Artifact

    @property
    def is_transformer(self)->bool:
        return isinstance(self.fit,TrainedTransformer)

def load_model(path:str|Path)->LoadedModel:
    artifact=read_artifact(path,MODEL)
    name=artifact.manifest.config['model']
    representation=artifact.manifest.config['representation']
    if name in (PLAIN,CBM):
        fit=transformer_from_artifact(artifact)
    else:
        document=artifact.read_json('model.json')
        if name=='sparse_logistic':
            fit=SparseLogisticFit.from_dict(document)
            if artifact.has_array('path_coefficients'):
                fit.path_coefficients=artifact.array('path_coefficients')
            if artifact.has_array('path_intercepts'):
                fit.path_intercepts=artifact.array('path_intercepts')
        elif name=='tree':
            fit=DecisionTreeFit.from_dict(document)
        elif name=='majority':
            fit=MajorityClassifier(probability=document['probability'],n_features=document['n_features'])
        else:
            raise ArtifactError(f"Unknown model '{name}' in {path}")
    return LoadedModel(name=name,representation=representation,fit=fit,artifact=artifact)

def save_attributions(attributions:list[Attribution], path:str|Path, model_path:str|Path, heatmaps:bool=True,
    overwrite:bool=False, config:dict|None=None)->Path:
    '''
    One GBL1 values file (and optionally one SVG heatmap) per sample, a combined long-format CSV
    (sample, time, species, value) and a JSON list of per-sample summaries.
    '''
    if not attributions:
        raise ValueError("save_attributions needs at least one attribution")
    files,arrays={},{}
    for attribution in attributions:
        name=f'values/sample_{attribution.sample_id}'
        file,data,spec=array_payload(name,attribution.values,BINARY,['time','species'],'float64')
        files[file]=data
        arrays[name]=spec
        if heatmaps:
            files[f'figures/sample_{attribution.sample_id}.svg']=lambda target,item=attribution:render.attribution_heatmap(item,target)
    ids=[attribution.sample_id for attribution in attributions]
    stacked=np.stack([attribution.values for attribution in attributions])
    files['attributions.csv']=encode_csv(stacked,['sample','time','species'],labels={0:ids})
    files['attributions.json']=_to_json([attribution.summary() for attribution in attributions])
    gaps={str(a.sample_id):a.completeness_gap for a in attributions if a.completeness_gap is not None}
    return write_artifact(path,ATTRIBUTIONS,files,config=config or {},arrays=arrays,upstream=[model_path],
        summary={'method':attributions[0].method,'samples':ids,'completeness_gaps':gaps},overwrite=overwrite)

def load_attributions(path:str|Path)->list[Attribution]:
    artifact=read_artifact(path,ATTRIBUTIONS)
    return [Attribution(values=artifact.array(f"values/sample_{summary['sample_id']}"),**summary)
        for summary in artifact.read_json('attributions.json')]

def save_embeddings(embeddings:EmbeddingSet, labels:np.ndarray, path:str|Path, model_path:str|Path,
    probe:list[ProbeStep]|None=None, overwrite:bool=False)->Path:
    '''Pooled hidden states, their sparse principal components and scores, a scatter plot and an optional probe.'''
    file,data,spec=array_payload('vectors',embeddings.flat(),BINARY,['sample','dimension'],'float64')
    files={file:data,'sample_ids.json':_to_json([int(i) for i in embeddings.sample_ids])}
    arrays={'vectors':spec}
    summary={'layer':embeddings.layer,'pooling':embeddings.pooling,'species':embeddings.species,
        'n_samples':embeddings.n_samples}
    if embeddings.scores is not None:
        file,data,spec=array_payload('components',embeddings.projection,BINARY,['dimension','component'],'float64')
        files[file]=data
        arrays['components']=spec
        columns=[f'pc{i+1}' for i in range(embeddings.scores.shape[1])]
        table=np.column_stack([embeddings.sample_ids,np.asarray(labels),embeddings.scores])
        buffer=io.StringIO()
        np.savetxt(buffer,table,delimiter=',',header=','.join(['sample','label']+columns),comments='',
            fmt=['%d','%d']+['%.9g']*len(columns))
        files['scores.csv']=buffer.getvalue()
        files['scatter.svg']=lambda target:render.embedding_scatter(embeddings,labels,target)
        summary|={'explained_variance':embeddings.explained_variance.tolist(),
            'loadings_sparsity':embeddings.loadings_sparsity}
    if probe:
        files['probe.json']=_to_json([{'alpha':step.alpha,'nearest_id':step.nearest_id,'distance':step.distance}
            for step in probe])
        file,data,spec=array_payload('probe_interpolants',np.stack([step.interpolant for step in probe]),BINARY,
            ['step','dimension'],'float64')
        files[file]=data
        arrays['probe_interpolants']=spec
    return write_artifact(path,EMBEDDINGS,files,config={'layer':embeddings.layer,'pooling':embeddings.pooling},
        arrays=arrays,upstream=[model_path],summary=summary,overwrite=overwrite)

def load_embeddings(path:str|Path)->EmbeddingSet:
    artifact=read_artifact(path,EMBEDDINGS)
    summary=artifact.manifest.summary
    projection=artifact.array('components') if artifact.has_array('components') else None
    vectors=artifact.array('vectors')
    scores=None
    if projection is not None:
        scores=(vectors-vectors.mean(axis=0))@projection
    variance=summary.get('explained_variance')
    return EmbeddingSet(layer=summary['layer'],pooling=summary['pooling'],vectors=vectors,
        sample_ids=np.asarray(artifact.read_json('sample_ids.json'),dtype=np.int64),species=summary.get('species'),
        projection=projection,scores=scores,explained_variance=None if variance is None else np.asarray(variance),
        loadings_sparsity=summary.get('loadings_sparsity'))

def load_probe(path:str|Path)->list[ProbeStep]|None:
    '''The interpolation probe stored with an embeddings artifact, or None when none was run.'''
    artifact=read_artifact(path,EMBEDDINGS)
    if not artifact.has('probe.json'):
        return None
    interpolants=artifact.array('probe_interpolants')
    return [ProbeStep(interpolant=interpolant,**step) for step,interpolant in zip(artifact.read_json('probe.json'),interpolants)]

def save_pdp(profiles:list[PdpProfile], path:str|Path, model_path:str|Path, overwrite:bool=False)->Path:
    '''Each profile as a (feature, grid value, mean prediction) CSV plus one SVG line plot.'''
    if not profiles:
        raise ValueError("save_pdp needs at least one profile")
    files={}
    for profile in profiles:
        buffer=io.StringIO()
        np.savetxt(buffer,np.column_stack([profile.grid,profile.profile]),delimiter=',',header='value,prediction',
            comments='',fmt='%.9g')
        files[f'feature_{profile.feature}.csv']=buffer.getvalue()
        files[f'feature_{profile.feature}.svg']=lambda target,item=profile:render.pdp_profile(item,target)
    names={str(profile.feature):profile.feature_name for profile in profiles}
    files['features.json']=_to_json(names)
    return write_artifact(path,PDP,files,config={'features':[profile.feature for profile in profiles]},
        upstream=[model_path],summary={'features':names},overwrite=overwrite)

def load_pdp(path:str|Path)->list[PdpProfile]:
    artifact=read_artifact(path,PDP)
    profiles=[]
    for feature,name in artifact.read_json('features.json').items():
        table=np.loadtxt(io.StringIO(artifact.read_text(f'feature_{feature}.csv')),delimiter=',',skiprows=1,ndmin=2)
        profiles.append(PdpProfile(feature=int(feature),grid=table[:,0],profile=table[:,1],feature_name=name))
    return profiles

def _timings_csv(report:EvalReport)->str:
    buffer=io.StringIO()
    writer=csv.writer(buffer,lineterminator='\n')
    writer.writerow(['representation','model','n_subjects','seed','train_time_s'])
    for row in report.rows:
        writer.writerow([row.representation,row.model,row.n_subjects,row.seed,'' if row.train_time_s is None else repr(row.train_time_s)])
    return buffer.getvalue()

def save_report(report:EvalReport, path:str|Path, upstream:list[str|Path]|None=None, overwrite:bool=False)->Path:
    '''
    Evaluation report. Timings, the machine descriptor and the rendered tables are volatile: they are stored
    and hashed per file but left out of the content hash, so a rerun of the same configuration hashes equal.
    '''
    document=report.to_dict()
    document.pop('machine')
    for row in document['rows']:
        row['train_time_s']=None
    files={
        'results.json':_to_json(document),
        'timings.csv':_timings_csv(report),
        'machine.json':_to_json(asdict(report.machine)),
        'table.txt':report.render()+'\n',
    }
    return write_artifact(path,REPORT,files,config=report.config,upstream=upstream or [],
        volatile=['timings.csv','machine.json','table.txt'],summary={'suite':report.suite,'n_rows':len(report.rows)},
        overwrite=overwrite)

def load_report(path:str|Path)->EvalReport:
    artifact=read_artifact(path,REPORT)
    document=artifact.read_json('results.json')
    document['machine']=artifact.read_json('machine.json')
    timings={}
    for record in csv.DictReader(io.StringIO(artifact.read_text('timings.csv'))):
        key=(record['representation'],record['model'],int(record['n_subjects']),int(record['seed']))
        timings[key]=float(record['train_time_s']) if record['train_time_s'] else None
    for row in document['rows']:
        row['train_time_s']=timings.get((row['representation'],row['model'],row['n_subjects'],row['seed']))
    return EvalReport.from_dict(document)
